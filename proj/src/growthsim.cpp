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

#include "growthsim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "errors.hpp"
#include "rng.hpp"
#include "sampling.hpp"

namespace rankent::growthsim {
namespace {

long long steps_per_year(double dt) {
  const double raw = 1.0 / dt;
  const double rounded = std::round(raw);
  if (!(rounded >= 1.0) || std::fabs(raw - rounded) > 1e-9 * rounded) {
    throw DomainError(
        "simulate: 1/dt must be a whole number of steps per year, got dt=" +
        std::to_string(dt));
  }
  return static_cast<long long>(rounded);
}

void check_config(const SimConfig& c) {
  if (c.n_units < 1) throw DomainError("simulate: n_units must be >= 1");
  if (!(c.dt > 0.0)) throw DomainError("simulate: dt must be > 0");
  if (c.steps < 1) throw DomainError("simulate: steps must be >= 1");
  if (!(c.k1_std >= 0.0) || !(c.kq_std >= 0.0)) {
    throw DomainError("simulate: rate standard deviations must be >= 0");
  }
  if (!std::isfinite(c.q) || !std::isfinite(c.k1_mean) ||
      !std::isfinite(c.kq_mean)) {
    throw DomainError("simulate: rates and exponent must be finite");
  }
  if (!(c.ceiling > 1.0)) throw DomainError("simulate: ceiling must be > 1");
  switch (c.init.kind) {
    case InitLaw::Kind::fixed:
      if (!(c.init.value >= 1.0)) {
        throw DomainError("simulate: fixed initial size must be >= 1");
      }
      break;
    case InitLaw::Kind::log_uniform:
      if (!(c.init.lo >= 1.0) || !(c.init.hi > c.init.lo)) {
        throw DomainError("simulate: log_uniform needs 1 <= lo < hi");
      }
      break;
    case InitLaw::Kind::equilibrium:
      validate(c.init.params);
      break;
  }
}

std::string unit_name(long long index, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "u%0*lld", std::min(width, 19), index + 1);
  return buf;
}

}  // namespace

std::vector<PanelRecord> simulate(const SimConfig& config) {
  check_config(config);
  const long long spy = steps_per_year(config.dt);
  const long long n_years = config.steps / spy;
  int width = 1;
  for (long long v = config.n_units; v >= 10; v /= 10) ++width;

  std::vector<PanelRecord> panel;
  panel.reserve(static_cast<std::size_t>(config.n_units) *
                static_cast<std::size_t>(n_years + 1));
  for (long long unit = 0; unit < config.n_units; ++unit) {
    Rng rng = Rng::substream(config.seed, static_cast<std::uint64_t>(unit));
    double x = 0.0;
    switch (config.init.kind) {
      case InitLaw::Kind::fixed:
        x = config.init.value;
        break;
      case InitLaw::Kind::log_uniform:
        x = std::exp(rng.uniform(std::log(config.init.lo),
                                 std::log(config.init.hi)));
        break;
      case InitLaw::Kind::equilibrium:
        x = sampling::sample(config.init.params, 1, rng)[0];
        break;
    }
    x = std::max(x, 1.0);
    const std::string name = unit_name(unit, width);
    auto emit = [&](long long year_offset) {
      PanelRecord rec;
      rec.unit_id = name;
      rec.year = config.year0 + year_offset;
      rec.population = std::llround(x);
      if (rec.population < 1) rec.population = 1;
      panel.push_back(std::move(rec));
    };
    emit(0);
    double k1 = config.k1_mean;
    double kq = config.kq_mean;
    if (!config.rates_per_step) {
      if (config.k1_std > 0.0) k1 = rng.normal(config.k1_mean, config.k1_std);
      if (config.kq_std > 0.0) kq = rng.normal(config.kq_mean, config.kq_std);
    }
    for (long long step = 1; step <= config.steps; ++step) {
      if (config.rates_per_step) {
        k1 = config.k1_std > 0.0 ? rng.normal(config.k1_mean, config.k1_std)
                                 : config.k1_mean;
        kq = config.kq_std > 0.0 ? rng.normal(config.kq_mean, config.kq_std)
                                 : config.kq_mean;
      }
      double drift = k1 * x + kq * std::pow(x, config.q);
      if (config.finite_size_noise) {
        drift += config.k1_std * std::sqrt(x) * rng.normal();
      }
      x += config.dt * drift;
      if (x < 1.0) x = 1.0;
      if (!(x < config.ceiling)) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "simulate: unit %s exceeded ceiling %.3g at step %lld "
                      "(x=%.6g); reduce dt or the rates",
                      name.c_str(), config.ceiling, step, x);
        throw ConvergenceError(buf);
      }
      if (step % spy == 0) emit(step / spy);
    }
  }
  return panel;
}

}  // namespace rankent::growthsim
