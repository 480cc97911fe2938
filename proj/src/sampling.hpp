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

#include <cstdint>
#include <vector>

#include "rng.hpp"
#include "types.hpp"

namespace rankent::sampling {

// n i.i.d. draws by inverse transform through the closed-form cumulative;
// for sigma > 0 each draw is then multiplied by exp(sigma * Z), Z standard
// normal, which samples the drift convolution exactly.  Deterministic for a
// fixed seed: uniforms are consumed first (one per draw), then normals.
std::vector<double> sample(const ModelParams& p, std::size_t n,
                           std::uint64_t seed);

// Same, drawing from a caller-managed stream (replica substreams).
std::vector<double> sample(const ModelParams& p, std::size_t n, Rng& rng);

// Monte Carlo envelope of size-ranked samples.  lower/upper are per-rank
// empirical quantiles at (1 -/+ level)/2 across replicas, each replica being
// an n_c-sample sorted descending.
struct ConfidenceBand {
  std::vector<double> ranks;
  std::vector<double> lower;
  std::vector<double> upper;
  double level = 0.0;
  long long replicas = 0;
  std::uint64_t seed = 0;
};

ConfidenceBand confidence_band(const ModelParams& p, long long n_c,
                               long long replicas, double level,
                               std::uint64_t seed);

}  // namespace rankent::sampling
