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

#include <cmath>
#include <vector>

#include <doctest.h>

#include "dynamics.hpp"
#include "errors.hpp"
#include "growthsim.hpp"
#include "panel.hpp"

using namespace rankent;

namespace {

// Noise-free bins on the law y = k1 + kq * e^{(q-1)u}.
dynamics::BinnedDynamics exact_bins(double k1, double kq, double q,
                                    double u_lo, double du, int n_bins) {
  dynamics::BinnedDynamics b;
  b.delta_u = du;
  for (int i = 0; i < n_bins; ++i) {
    const double u = u_lo + du * (i + 0.5);
    b.bin_center.push_back(u);
    b.mean_udot.push_back(k1 + kq * std::exp((q - 1.0) * u));
    b.std_udot.push_back(1e-3);
    b.count.push_back(100);
  }
  return b;
}

}  // namespace

TEST_CASE("growth points from a hand-built panel") {
  std::vector<PanelRecord> panel = {
      {"a", 2001, 150, ""},  // out of order on purpose
      {"a", 2000, 100, ""},
      {"a", 2003, 300, ""},
      {"b", 2005, 77, ""},   // single year, contributes nothing
  };
  const auto pts = dynamics::panel_to_points(panel);
  REQUIRE(pts.size() == 2);
  CHECK(pts[0].unit_id == "a");
  CHECK(pts[0].period == std::make_pair(2000LL, 2001LL));
  CHECK(pts[0].u ==
        doctest::Approx(0.5 * (std::log(100.0) + std::log(150.0))));
  CHECK(pts[0].udot == doctest::Approx(std::log(1.5)));
  // The two-year gap divides the log ratio.
  CHECK(pts[1].period == std::make_pair(2001LL, 2003LL));
  CHECK(pts[1].udot == doctest::Approx(0.5 * std::log(2.0)));
}

TEST_CASE("growth points reject broken panels") {
  CHECK_THROWS_AS(dynamics::panel_to_points({}), DomainError);
  std::vector<PanelRecord> dup = {
      {"a", 2000, 100, ""}, {"a", 2000, 120, ""}, {"a", 2001, 140, ""}};
  CHECK_THROWS_AS(dynamics::panel_to_points(dup), DomainError);
  std::vector<PanelRecord> bad = {{"a", 2000, 0, ""}, {"a", 2001, 10, ""}};
  CHECK_THROWS_AS(dynamics::panel_to_points(bad), DomainError);
  std::vector<PanelRecord> lonely = {{"a", 2000, 5, ""}, {"b", 2001, 7, ""}};
  CHECK_THROWS_AS(dynamics::panel_to_points(lonely), DomainError);
}

TEST_CASE("binning anchors at the smallest u and filters sparse bins") {
  std::vector<dynamics::DynamicsPoint> pts;
  for (double u : {0.0, 0.1, 0.24, 0.25, 0.6}) {
    dynamics::DynamicsPoint p;
    p.u = u;
    p.udot = u;  // arbitrary
    pts.push_back(p);
  }
  const auto all = dynamics::bin_points(pts, 0.25, 0.15);
  REQUIRE(all.bin_center.size() == 3);
  CHECK(all.bin_center[0] == doctest::Approx(0.125));
  CHECK(all.bin_center[1] == doctest::Approx(0.375));
  CHECK(all.bin_center[2] == doctest::Approx(0.625));
  CHECK(all.count[0] == 3);
  CHECK(all.count[1] == 1);
  CHECK(all.mean_udot[0] == doctest::Approx((0.0 + 0.1 + 0.24) / 3.0));

  // A 40% floor relative to the fullest bin drops the singleton bins.
  const auto strict = dynamics::bin_points(pts, 0.25, 0.4);
  REQUIRE(strict.bin_center.size() == 1);
  CHECK(strict.count[0] == 3);

  CHECK_THROWS_AS(dynamics::bin_points({}, 0.25, 0.15), DomainError);
  CHECK_THROWS_AS(dynamics::bin_points(pts, 0.0, 0.15), DomainError);
  CHECK_THROWS_AS(dynamics::bin_points(pts, 0.25, -0.1), DomainError);
}

TEST_CASE("exact bins pin down (k1, kq, q)") {
  const auto bins = exact_bins(0.01, 0.002, 1.5, 2.0, 0.5, 12);
  const auto fit = dynamics::fit_dynamics(bins);
  CHECK(fit.well_defined);
  CHECK(fit.q == doctest::Approx(1.5).epsilon(1e-5));
  CHECK(fit.k1 == doctest::Approx(0.01).epsilon(1e-4));
  CHECK(fit.kq == doctest::Approx(0.002).epsilon(1e-3));
  CHECK(fit.correlation > 0.999999);
  CHECK(fit.n_bins == 12);
  CHECK(fit.sse < 1e-12);
  // Noise-free data leaves nothing to weight.
  const auto wfit = dynamics::fit_dynamics(bins, true);
  CHECK(wfit.q == doctest::Approx(fit.q).epsilon(1e-6));
}

TEST_CASE("a contracting law with q below one is also identified") {
  const auto bins = exact_bins(0.03, -0.05, 0.6, 4.0, 0.4, 10);
  const auto fit = dynamics::fit_dynamics(bins);
  CHECK(fit.well_defined);
  CHECK(fit.q == doctest::Approx(0.6).epsilon(1e-4));
  CHECK(fit.kq == doctest::Approx(-0.05).epsilon(1e-3));
}

TEST_CASE("constant growth is reported as ill-defined with q = 1") {
  dynamics::BinnedDynamics b;
  b.delta_u = 0.25;
  for (int i = 0; i < 8; ++i) {
    b.bin_center.push_back(1.0 + 0.25 * i);
    b.mean_udot.push_back(0.02);
    b.std_udot.push_back(0.0);
    b.count.push_back(5);
  }
  const auto fit = dynamics::fit_dynamics(b);
  CHECK(!fit.well_defined);
  CHECK(fit.q == 1.0);
  CHECK(fit.k1 == doctest::Approx(0.02));
}

TEST_CASE("weighting lets a noisy bin be discounted") {
  auto bins = exact_bins(0.01, 0.001, 1.5, 2.0, 0.5, 13);
  // One wild bin: far off the curve, tiny count, huge spread.
  bins.bin_center.push_back(9.0);
  bins.mean_udot.push_back(10.0 * (0.01 + 0.001 * std::exp(0.5 * 9.0)));
  bins.std_udot.push_back(5.0);
  bins.count.push_back(2);

  const auto plain = dynamics::fit_dynamics(bins, false);
  const auto weighted = dynamics::fit_dynamics(bins, true);
  CHECK(std::fabs(weighted.q - 1.5) < 0.02);
  CHECK(std::fabs(weighted.q - 1.5) < std::fabs(plain.q - 1.5));
}

TEST_CASE("fit refuses fewer than four bins") {
  auto bins = exact_bins(0.01, 0.002, 1.5, 2.0, 0.5, 3);
  CHECK_THROWS_AS(dynamics::fit_dynamics(bins), DomainError);
}

TEST_CASE("linear diagnostic fit reproduces an exact line") {
  dynamics::BinnedDynamics b;
  b.delta_u = 0.25;
  for (int i = 0; i < 6; ++i) {
    b.bin_center.push_back(2.0 + 0.5 * i);
    b.mean_udot.push_back(0.01 - 0.002 * (2.0 + 0.5 * i));
    b.std_udot.push_back(0.0);
    b.count.push_back(3);
  }
  const auto fit = dynamics::fit_dynamics_linear(b);
  CHECK(fit.slope == doctest::Approx(-0.002).epsilon(1e-10));
  CHECK(fit.intercept == doctest::Approx(0.01).epsilon(1e-8));
  CHECK(fit.correlation == doctest::Approx(-1.0));
}

TEST_CASE("simulated q-exponential growth is recovered from the panel") {
  growthsim::SimConfig cfg;
  cfg.n_units = 400;
  cfg.q = 1.5;
  cfg.k1_mean = 0.005;
  cfg.kq_mean = 5e-4;
  cfg.dt = 0.1;
  cfg.steps = 50;
  cfg.seed = 12345;
  cfg.init.kind = growthsim::InitLaw::Kind::log_uniform;
  cfg.init.lo = 50.0;
  cfg.init.hi = 50000.0;
  const auto panel = growthsim::simulate(cfg);

  const auto pts = dynamics::panel_to_points(panel);
  const auto bins = dynamics::bin_points(pts);
  const auto fit = dynamics::fit_dynamics(bins);
  CHECK(fit.well_defined);
  CHECK(std::fabs(fit.q - 1.5) < 0.1);
  CHECK(fit.correlation > 0.99);
}

TEST_CASE("pure proportional growth with noise is flagged, not forced") {
  growthsim::SimConfig cfg;
  cfg.n_units = 300;
  cfg.q = 1.0;
  cfg.k1_mean = 0.02;
  cfg.k1_std = 0.03;
  cfg.kq_mean = 0.0;
  cfg.dt = 0.1;
  cfg.steps = 100;
  cfg.seed = 77;
  cfg.init.kind = growthsim::InitLaw::Kind::log_uniform;
  cfg.init.lo = 1000.0;
  cfg.init.hi = 1e6;
  const auto panel = growthsim::simulate(cfg);

  const auto bins = dynamics::bin_points(dynamics::panel_to_points(panel));
  const auto fit = dynamics::fit_dynamics(bins);
  CHECK(!fit.well_defined);
  CHECK(fit.q == 1.0);
  CHECK(std::fabs(fit.k1 - 0.02) < 0.01);
}
