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

#include "sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "errors.hpp"
#include "model.hpp"
#include "specfun.hpp"

namespace rankent::sampling {
namespace {

// Type-7 quantile (linear interpolation between order statistics) of an
// ascending-sorted vector.
double quantile_sorted(const std::vector<double>& v, double prob) {
  const double h = static_cast<double>(v.size() - 1) * prob;
  const std::size_t i = static_cast<std::size_t>(h);
  if (i + 1 >= v.size()) return v.back();
  const double f = h - static_cast<double>(i);
  return v[i] * (1.0 - f) + v[i + 1] * f;
}

}  // namespace

std::vector<double> sample(const ModelParams& p, std::size_t n, Rng& rng) {
  validate(p);
  if (n == 0) return {};
  // Tail probability P(X > x) = Gamma(a, lambda x/x0) / Gamma(a, lambda) is
  // set equal to a uniform variate and inverted.  The inversions run in
  // sorted order so each root warm-starts the next; results are scattered
  // back to draw order, which keeps the output independent of this detail.
  std::vector<double> u(n);
  for (auto& v : u) v = rng.uniform();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return u[a] < u[b]; });
  const double a = 1.0 - p.q;
  const double lg = specfun::upper_gamma_ln(a, p.lambda);
  std::vector<double> ln_y(n), z(n);
  for (std::size_t i = 0; i < n; ++i) {
    ln_y[i] = lg + std::log(u[idx[i]]);
  }
  specfun::inverse_upper_gamma_sorted(a, ln_y.data(), z.data(), n);
  std::vector<double> out(n);
  const double scale = p.x0 / p.lambda;
  for (std::size_t i = 0; i < n; ++i) {
    out[idx[i]] = scale * z[i];
  }
  if (p.sigma > 0.0) {
    for (auto& x : out) x *= std::exp(p.sigma * rng.normal());
  }
  return out;
}

std::vector<double> sample(const ModelParams& p, std::size_t n,
                           std::uint64_t seed) {
  Rng rng(seed);
  return sample(p, n, rng);
}

ConfidenceBand confidence_band(const ModelParams& p, long long n_c,
                               long long replicas, double level,
                               std::uint64_t seed) {
  validate(p);
  if (n_c < 2) throw DomainError("confidence_band: n_c must be >= 2");
  if (!(level > 0.0) || !(level < 1.0)) {
    throw DomainError("confidence_band: level must be in (0, 1)");
  }
  if (replicas < 1000) {
    throw DomainError(
        "confidence_band: needs >= 1000 replicas for stable quantiles");
  }
  const std::size_t nc = static_cast<std::size_t>(n_c);
  const std::size_t reps = static_cast<std::size_t>(replicas);
  if (nc * reps > std::size_t{300000000}) {
    throw DomainError("confidence_band: n_c * replicas too large to hold");
  }
  // Row r = replica r's descending order statistics.
  std::vector<double> all(nc * reps);
  for (std::size_t r = 0; r < reps; ++r) {
    Rng rng = Rng::substream(seed, r);
    std::vector<double> draw = sample(p, nc, rng);
    std::sort(draw.begin(), draw.end(), std::greater<double>());
    std::copy(draw.begin(), draw.end(), all.begin() + r * nc);
  }
  ConfidenceBand band;
  band.level = level;
  band.replicas = replicas;
  band.seed = seed;
  band.ranks.resize(nc);
  band.lower.resize(nc);
  band.upper.resize(nc);
  const double p_lo = (1.0 - level) / 2.0;
  const double p_hi = (1.0 + level) / 2.0;
  std::vector<double> column(reps);
  for (std::size_t j = 0; j < nc; ++j) {
    for (std::size_t r = 0; r < reps; ++r) {
      column[r] = all[r * nc + j];
    }
    std::sort(column.begin(), column.end());
    band.ranks[j] = static_cast<double>(j) + 0.5;
    band.lower[j] = quantile_sorted(column, p_lo);
    band.upper[j] = quantile_sorted(column, p_hi);
  }
  return band;
}

}  // namespace rankent::sampling
