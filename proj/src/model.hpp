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
#include <vector>

#include "types.hpp"

namespace rankent::model {

// Probability density of the equilibrium size distribution.  For sigma = 0
// the support is [x0, inf) and x below x0 yields 0; for sigma > 0 the
// log-normal drift kernel spreads mass below x0 and the density is computed
// by numerical convolution.  x <= 0 is a domain error.
double density(const ModelParams& p, double x);

// Cumulative distribution P(x) = 1 - Gamma(1-q, lambda*x/x0)/Gamma(1-q,
// lambda), defined for sigma = 0 and x >= x0 only (domain error otherwise).
double cumulative(const ModelParams& p, double x);

// Size at fractional rank r in (0, n_c]: the inverse of the tail count
//   x(r) = (x0/lambda) * InvGamma(1-q, Gamma(1-q,lambda) * r / n_c).
// sigma must be 0 and p.n_c must be set.  Decreasing in r; x(n_c) = x0.
double rank_curve(const ModelParams& p, double r);

// Batch evaluation at ascending ranks (warm-started inversion).
void rank_curve(const ModelParams& p, const double* ranks, double* x,
                std::size_t n);

// Rescales a ranked sample onto the parameter-free master curve
// x' = InvGamma(0, r').  Defined only at q = 1 and sigma = 0.
ScaledCurve gamma_scale(const RankedSample& sample, const ModelParams& p);

// Mean size in units of x0:
//   E[x]/x0 = Gamma(2-q,lambda) / (lambda * Gamma(1-q,lambda)) * e^{sigma^2/2}.
double equation_of_state_mean(const ModelParams& p);

// Solves E[x] * n_c = n_total for lambda at fixed (q, x0, sigma); relative
// residual <= 1e-8.  Throws InfeasibleError when n_total/(n_c*x0) is at or
// below the lambda -> inf limit e^{sigma^2/2} (i.e. x0 is too large for the
// requested mean), ConvergenceError if no bracket exists in representable
// lambda.
double solve_lambda(double n_total, long long n_c, double x0, double q,
                    double sigma);

// Drift-convolved cumulative: P_sigma(x) = E_z[ P_0(x e^{-sigma z}) ] with z
// standard normal.  Extends the sigma = 0 cumulative (returns 0 below the
// support).  `fast` trades ~1e-7 absolute accuracy for fixed-node quadrature;
// the default adaptive path is good to ~1e-9.
double drift_cumulative(const ModelParams& p, double x, bool fast = false);

// Numeric inverse of drift_cumulative on a tabulated monotone grid, giving
// the drift-convolved rank curve r -> x.  Build cost is ~200 cumulative
// evaluations; evaluation is then cheap, which is what the least-squares
// fit loop needs.
class DriftRankCurve {
 public:
  DriftRankCurve(const ModelParams& p, long long n_c, bool fast = true);

  double at_rank(double r) const;

 private:
  double x0_;
  double n_c_;
  // Monotone cubic u(w), w = logit(P), u = ln(x/x0).
  std::vector<double> w_, u_, slope_;
};

}  // namespace rankent::model
