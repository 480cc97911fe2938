// Copyright (c) 2026 The rankent Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace rankent {

// Equilibrium distribution parameters.  The size density is
//
//   p(x) = Z^{-1} e^{-lambda x / x0} x^{-q},   x >= x0,
//   Z    = (lambda/x0)^{q-1} Gamma(1-q, lambda),
//
// optionally blurred by a log-normal drift kernel of width sigma.  Z is
// always derived from (q, lambda, x0); it is never stored, so the struct
// cannot go stale.  n_c (unit count) and n_total (aggregate size) describe
// the ensemble the parameters refer to; 0 means unset.
struct ModelParams {
  double q = 1.0;
  double lambda = 1.0;
  double x0 = 1.0;
  double sigma = 0.0;
  long long n_c = 0;
  double n_total = 0.0;
};

// Throws DomainError on any violated invariant: q in (0,2], lambda > 0,
// x0 >= 1, sigma >= 0, n_c >= 2 when set, and n_total >= n_c*x0 when both
// counts are set with sigma = 0 (otherwise no lambda can satisfy the
// constraint equation).
void validate(const ModelParams& p);

// A cross-section ranked by size: sizes descending, middle-point ranks
// r_i = i - 0.5 for i = 1..n_c.
struct RankedSample {
  std::vector<double> sizes;
  std::vector<double> ranks;
  std::string label;

  std::size_t n_c() const { return sizes.size(); }
};

// Sorts descending, assigns middle-point ranks, validates positivity.
RankedSample make_ranked_sample(std::vector<double> sizes,
                                std::string label = "");

// A rank curve after scaling x' = x*lambda/x0, r' = r*Gamma(0,lambda)/n_c.
// Scaled ranks are not middle-point integers, hence a distinct type.
struct ScaledCurve {
  std::vector<double> ranks;
  std::vector<double> sizes;
  std::string label;
};

}  // namespace rankent
