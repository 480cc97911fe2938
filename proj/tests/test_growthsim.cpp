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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include <doctest.h>

#include "errors.hpp"
#include "growthsim.hpp"
#include "model.hpp"
#include "panel.hpp"

using namespace rankent;

namespace {

bool panels_equal(const std::vector<PanelRecord>& a,
                  const std::vector<PanelRecord>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].unit_id != b[i].unit_id || a[i].year != b[i].year ||
        a[i].population != b[i].population || a[i].group != b[i].group) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("noise-free proportional growth matches the closed form") {
  growthsim::SimConfig cfg;
  cfg.n_units = 3;
  cfg.k1_mean = 0.05;
  cfg.dt = 0.25;
  cfg.steps = 8;  // two years at four steps per year
  cfg.init.kind = growthsim::InitLaw::Kind::fixed;
  cfg.init.value = 1000.0;
  const auto panel = growthsim::simulate(cfg);
  REQUIRE(panel.size() == 9);  // 3 units x (initial + 2 snapshots)
  for (int year = 0; year <= 2; ++year) {
    const double x = 1000.0 * std::pow(1.0 + 0.25 * 0.05, 4.0 * year);
    const long long want = std::llround(x);
    for (int unit = 0; unit < 3; ++unit) {
      const PanelRecord& rec = panel[static_cast<std::size_t>(unit * 3 + year)];
      CHECK(rec.year == 2000 + year);
      CHECK(rec.population == want);
    }
  }
  CHECK(panel[0].unit_id == "u1");
  CHECK(panel[3].unit_id == "u2");
}

TEST_CASE("output is ordered by unit then year with padded names") {
  growthsim::SimConfig cfg;
  cfg.n_units = 12;
  cfg.steps = 30;
  cfg.dt = 0.1;
  cfg.year0 = 1990;
  const auto panel = growthsim::simulate(cfg);
  REQUIRE(panel.size() == 12 * 4);  // 30 steps at 10/year: 3 years + initial
  CHECK(panel.front().unit_id == "u01");
  CHECK(panel.back().unit_id == "u12");
  for (std::size_t i = 1; i < panel.size(); ++i) {
    const bool ordered =
        panel[i - 1].unit_id < panel[i].unit_id ||
        (panel[i - 1].unit_id == panel[i].unit_id &&
         panel[i - 1].year < panel[i].year);
    REQUIRE(ordered);
  }
  CHECK(panel[0].year == 1990);
  CHECK(panel[3].year == 1993);
}

TEST_CASE("a partial trailing year produces no snapshot") {
  growthsim::SimConfig cfg;
  cfg.n_units = 1;
  cfg.steps = 10;  // 2.5 years at dt = 0.25
  cfg.dt = 0.25;
  const auto panel = growthsim::simulate(cfg);
  CHECK(panel.size() == 3);  // years 2000, 2001, 2002
  CHECK(panel.back().year == 2002);
}

TEST_CASE("identical seeds reproduce the panel, different seeds do not") {
  growthsim::SimConfig cfg;
  cfg.n_units = 20;
  cfg.k1_mean = 0.02;
  cfg.k1_std = 0.05;
  cfg.steps = 50;
  cfg.seed = 9;
  cfg.init.kind = growthsim::InitLaw::Kind::log_uniform;
  const auto a = growthsim::simulate(cfg);
  const auto b = growthsim::simulate(cfg);
  CHECK(panels_equal(a, b));
  cfg.seed = 10;
  const auto c = growthsim::simulate(cfg);
  CHECK(!panels_equal(a, c));
}

TEST_CASE("simulated panels survive the CSV round trip") {
  growthsim::SimConfig cfg;
  cfg.n_units = 7;
  cfg.k1_mean = 0.03;
  cfg.k1_std = 0.02;
  cfg.steps = 40;
  cfg.init.kind = growthsim::InitLaw::Kind::log_uniform;
  const auto panel = growthsim::simulate(cfg);
  const std::string path = "/tmp/rankent_sim_roundtrip.csv";
  write_panel_csv(panel, path);
  const Dataset ds = ingest(path);
  CHECK(panels_equal(ds.panel, panel));
  std::remove(path.c_str());
}

TEST_CASE("populations are floored at one") {
  growthsim::SimConfig cfg;
  cfg.n_units = 2;
  cfg.k1_mean = -0.9;
  cfg.dt = 1.0;
  cfg.steps = 12;
  cfg.init.kind = growthsim::InitLaw::Kind::fixed;
  cfg.init.value = 1000.0;
  const auto panel = growthsim::simulate(cfg);
  for (const PanelRecord& rec : panel) REQUIRE(rec.population >= 1);
  CHECK(panel.back().population == 1);
}

TEST_CASE("runaway growth aborts against the ceiling") {
  growthsim::SimConfig cfg;
  cfg.n_units = 1;
  cfg.k1_mean = 2.0;
  cfg.dt = 1.0;
  cfg.steps = 10;
  cfg.ceiling = 1e10;
  cfg.init.kind = growthsim::InitLaw::Kind::fixed;
  cfg.init.value = 1e9;
  CHECK_THROWS_AS(growthsim::simulate(cfg), ConvergenceError);
}

TEST_CASE("dt must divide the year into whole steps") {
  growthsim::SimConfig cfg;
  cfg.n_units = 1;
  cfg.steps = 4;
  cfg.dt = 0.3;
  CHECK_THROWS_AS(growthsim::simulate(cfg), DomainError);
  cfg.dt = 0.4;
  CHECK_THROWS_AS(growthsim::simulate(cfg), DomainError);
  cfg.dt = 0.25;
  CHECK_NOTHROW(growthsim::simulate(cfg));
  cfg.dt = 1.0;
  CHECK_NOTHROW(growthsim::simulate(cfg));
}

TEST_CASE("config validation catches bad inputs") {
  growthsim::SimConfig cfg;
  cfg.n_units = 0;
  CHECK_THROWS_AS(growthsim::simulate(cfg), DomainError);
  cfg = {};
  cfg.steps = 0;
  CHECK_THROWS_AS(growthsim::simulate(cfg), DomainError);
  cfg = {};
  cfg.k1_std = -0.1;
  CHECK_THROWS_AS(growthsim::simulate(cfg), DomainError);
  cfg = {};
  cfg.ceiling = 0.5;
  CHECK_THROWS_AS(growthsim::simulate(cfg), DomainError);
  cfg = {};
  cfg.init.kind = growthsim::InitLaw::Kind::fixed;
  cfg.init.value = 0.5;
  CHECK_THROWS_AS(growthsim::simulate(cfg), DomainError);
  cfg = {};
  cfg.init.kind = growthsim::InitLaw::Kind::log_uniform;
  cfg.init.lo = 0.5;
  CHECK_THROWS_AS(growthsim::simulate(cfg), DomainError);
  cfg = {};
  cfg.init.kind = growthsim::InitLaw::Kind::equilibrium;
  cfg.init.params.q = 3.0;  // out of range
  CHECK_THROWS_AS(growthsim::simulate(cfg), DomainError);
}

TEST_CASE("equilibrium initial sizes follow the target distribution") {
  ModelParams p;
  p.q = 1.2;
  p.lambda = 0.01;
  p.x0 = 500.0;

  growthsim::SimConfig cfg;
  cfg.n_units = 4000;
  cfg.k1_mean = 0.0;
  cfg.steps = 1;
  cfg.dt = 1.0;
  cfg.seed = 31;
  cfg.init.kind = growthsim::InitLaw::Kind::equilibrium;
  cfg.init.params = p;
  const auto panel = growthsim::simulate(cfg);

  std::vector<double> first;
  for (const PanelRecord& rec : panel) {
    if (rec.year == 2000) first.push_back(static_cast<double>(rec.population));
  }
  REQUIRE(first.size() == 4000);
  std::sort(first.begin(), first.end());
  // Kolmogorov-Smirnov against the model cumulative.  Snapshot rounding
  // moves each point by < 1/x0, far below the 1% critical distance.
  double d = 0.0;
  const double n = static_cast<double>(first.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    const double f = model::cumulative(p, std::max(first[i], p.x0));
    d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
    d = std::max(d, std::fabs(f - static_cast<double>(i + 1) / n));
  }
  CHECK(d < 1.628 / std::sqrt(n));
}

TEST_CASE("per-unit rates are a distinct mode") {
  growthsim::SimConfig cfg;
  cfg.n_units = 10;
  cfg.k1_mean = 0.02;
  cfg.k1_std = 0.3;
  cfg.steps = 50;
  cfg.seed = 4;
  const auto per_step = growthsim::simulate(cfg);
  cfg.rates_per_step = false;
  const auto per_unit = growthsim::simulate(cfg);
  CHECK(!panels_equal(per_step, per_unit));

  // Without rate dispersion the two modes coincide.
  cfg.k1_std = 0.0;
  const auto quiet_unit = growthsim::simulate(cfg);
  cfg.rates_per_step = true;
  const auto quiet_step = growthsim::simulate(cfg);
  CHECK(panels_equal(quiet_unit, quiet_step));
}
