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

#include "panel.hpp"
#include "types.hpp"

namespace rankent::growthsim {

// Initial-size law for a simulated unit.
struct InitLaw {
  enum class Kind { fixed, log_uniform, equilibrium };
  Kind kind = Kind::fixed;
  double value = 1000.0;      // fixed
  double lo = 50.0;           // log_uniform bounds
  double hi = 50000.0;
  ModelParams params;         // equilibrium draw
};

struct SimConfig {
  long long n_units = 100;
  double q = 1.0;
  double k1_mean = 0.01;
  double k1_std = 0.0;
  double kq_mean = 0.0;
  double kq_std = 0.0;
  bool finite_size_noise = false;
  double dt = 0.1;            // years; 1/dt must be a whole number of steps
  long long steps = 100;
  InitLaw init;
  std::uint64_t seed = 1;
  long long year0 = 2000;     // calendar year of the initial snapshot
  double ceiling = 1e12;      // abort threshold for numerical blow-up
  // Redraw rates every step (the default) or once per unit (debug aid for
  // separating rate dispersion from path noise).
  bool rates_per_step = true;
};

// Forward-Euler evolution x <- x + dt*(k1*x + kq*x^q + s*sqrt(x)*xi) with
// per-unit RNG substreams, population floored at 1, annual snapshots
// rounded to whole persons.  The demographic term uses s = k1_std and only
// enters when finite_size_noise is set.  Output is ordered by
// (unit_id, year).
std::vector<PanelRecord> simulate(const SimConfig& config);

}  // namespace rankent::growthsim

