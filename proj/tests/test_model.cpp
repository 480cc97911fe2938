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

#include "errors.hpp"
#include "model.hpp"
#include "oracles.hpp"
#include "specfun.hpp"
#include "types.hpp"

using namespace rankent;

namespace {

ModelParams params(double q, double lambda, double x0, double sigma = 0.0,
                   long long n_c = 0) {
  ModelParams p;
  p.q = q;
  p.lambda = lambda;
  p.x0 = x0;
  p.sigma = sigma;
  p.n_c = n_c;
  return p;
}

}  // namespace

TEST_CASE("cumulative against direct quadrature") {
  const ModelParams p = params(1.3, 0.05, 10.0);
  // P(x) is the mass of t^{-q} e^{-lambda t} between 1 and x/x0 over the
  // mass on [1, inf); evaluate both pieces with the oracle integrator.
  auto weight = [&](double t) {
    return std::pow(t, -p.q) * std::exp(-p.lambda * t);
  };
  for (double ratio : {1.5, 3.0, 10.0, 120.0}) {
    const double x = p.x0 * ratio;
    const double head = oracles::simpson(weight, 1.0, ratio, 1e-13);
    const double total =
        std::pow(p.lambda, p.q - 1.0) * oracles::upper_gamma(1.0 - p.q,
                                                             p.lambda);
    CHECK(model::cumulative(p, x) ==
          doctest::Approx(head / total).epsilon(1e-9));
  }
  CHECK(model::cumulative(p, p.x0) == doctest::Approx(0.0));
}

TEST_CASE("density integrates to the cumulative") {
  const ModelParams p = params(0.9, 0.2, 5.0);
  auto f = [&](double x) { return model::density(p, x); };
  const double mass = oracles::simpson(f, p.x0, 40.0 * p.x0, 1e-12);
  CHECK(mass == doctest::Approx(model::cumulative(p, 40.0 * p.x0))
                    .epsilon(1e-8));
}

TEST_CASE("rank curve and cumulative are inverse maps") {
  // Parameter grid spans the observed ranges, including a point with a
  // very large x0 and strongly negative log lambda.
  struct Case {
    double q, log_lambda, log_x0;
  };
  const std::vector<Case> cases = {
      {1.0, 0.0, 0.0},   {0.8, -2.0, 2.0},   {1.3, -6.0, 5.0},
      {1.62, -3.7, 10.1}, {1.9, -11.0, 12.0}, {0.5, -1.0, 1.0},
  };
  for (const Case& c : cases) {
    ModelParams p = params(c.q, std::exp(c.log_lambda), std::exp(c.log_x0));
    p.n_c = 500;
    for (double r : {0.5, 1.0, 7.5, 99.0, 250.0, 499.5, 500.0}) {
      const double x = model::rank_curve(p, r);
      const double back = model::cumulative(p, x);
      CHECK(std::fabs(back - (1.0 - r / 500.0)) <= 1e-8);
    }
  }
}

TEST_CASE("batch rank curve equals scalar calls in any order") {
  ModelParams p = params(1.45, 0.01, 50.0);
  p.n_c = 300;
  std::vector<double> ranks = {250.0, 0.5, 37.5, 299.5, 1.5, 150.0};
  std::vector<double> xs(ranks.size());
  model::rank_curve(p, ranks.data(), xs.data(), ranks.size());
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    CHECK(xs[i] == doctest::Approx(model::rank_curve(p, ranks[i]))
                       .epsilon(1e-10));
  }
}

TEST_CASE("equation of state at q=1, lambda=1") {
  const ModelParams p = params(1.0, 1.0, 1.0);
  // Reference via the oracle: Gamma(1,1)/(1*Gamma(0,1)).
  const double ref = oracles::upper_gamma(1.0, 1.0) /
                     oracles::upper_gamma(0.0, 1.0);
  CHECK(model::equation_of_state_mean(p) == doctest::Approx(ref).epsilon(1e-9));
  CHECK(model::equation_of_state_mean(p) ==
        doctest::Approx(1.67680).epsilon(1e-4 / 1.6768));
}

TEST_CASE("solve_lambda round-trips the mean constraint") {
  for (double q : {0.8, 1.0, 1.4}) {
    for (double sigma : {0.0, 0.35}) {
      for (double lambda : {1.0, 0.01, 1e-5}) {
        ModelParams p = params(q, lambda, 7.0, sigma);
        const double mean = model::equation_of_state_mean(p) * p.x0;
        const double back =
            model::solve_lambda(mean * 1000.0, 1000, p.x0, q, sigma);
        CHECK(back == doctest::Approx(lambda).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("solve_lambda rejects unreachable means") {
  // With sigma = 0 the mean can never fall below x0 itself.
  CHECK_THROWS_AS(model::solve_lambda(900.0, 1000, 1.0, 1.0, 0.0),
                  InfeasibleError);
  CHECK_THROWS_AS(model::solve_lambda(1000.0 * 9.99, 1000, 10.0, 1.0, 0.0),
                  InfeasibleError);
}

TEST_CASE("gamma scaling collapses exact model points") {
  // Two unrelated q=1 populations, scaled, must land on the same curve
  // x' = InvGamma(0, r'); verify through the scaled cumulative identity.
  for (double lambda : {0.3, 0.004}) {
    ModelParams p = params(1.0, lambda, lambda < 0.01 ? 120.0 : 3.0);
    p.n_c = 80;
    std::vector<double> sizes;
    for (int i = 1; i <= 80; ++i) {
      sizes.push_back(model::rank_curve(p, i - 0.5));
    }
    const RankedSample s = make_ranked_sample(std::move(sizes), "g");
    const ScaledCurve curve = model::gamma_scale(s, p);
    for (std::size_t i = 0; i < curve.ranks.size(); ++i) {
      const double expect = specfun::inverse_upper_gamma(0.0, curve.ranks[i]);
      CHECK(curve.sizes[i] == doctest::Approx(expect).epsilon(1e-8));
    }
  }
}

TEST_CASE("gamma scaling is q=1, sigma=0 only") {
  ModelParams p = params(1.2, 0.1, 2.0);
  p.n_c = 10;
  std::vector<double> sizes;
  for (int i = 10; i >= 1; --i) sizes.push_back(2.0 * i);
  const RankedSample s = make_ranked_sample(std::move(sizes), "g");
  CHECK_THROWS_AS(model::gamma_scale(s, p), DomainError);
}

TEST_CASE("drift cumulative reduces to the plain cumulative at sigma 0") {
  const ModelParams p = params(1.5, 0.02, 4.0);
  for (double ratio : {1.1, 2.0, 20.0}) {
    CHECK(model::drift_cumulative(p, p.x0 * ratio) ==
          doctest::Approx(model::cumulative(p, p.x0 * ratio)).epsilon(1e-12));
  }
}

TEST_CASE("drift cumulative against a direct double integral") {
  ModelParams p = params(1.2, 0.1, 3.0, 0.4);
  // E_z[P0(x e^{-sigma z})] with an explicit Gauss kernel through the
  // oracle integrator; completely independent of the implementation's
  // node layout.
  const ModelParams base = params(p.q, p.lambda, p.x0, 0.0);
  for (double x : {1.0, 3.0, 9.0, 40.0}) {
    auto f = [&](double z) {
      const double shifted = x * std::exp(-p.sigma * z);
      const double p0 =
          shifted <= base.x0 ? 0.0 : model::cumulative(base, shifted);
      return p0 * std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
    };
    const double ref = oracles::simpson(f, -9.0, 9.0, 1e-12);
    CHECK(model::drift_cumulative(p, x) == doctest::Approx(ref).epsilon(1e-7));
    CHECK(model::drift_cumulative(p, x, true) ==
          doctest::Approx(ref).epsilon(2e-5));
  }
}

TEST_CASE("drift rank curve inverts the drift cumulative") {
  ModelParams p = params(1.35, 0.01, 25.0, 0.3);
  p.n_c = 200;
  const model::DriftRankCurve curve(p, 200, /*fast=*/false);
  for (double r : {0.5, 10.0, 50.0, 120.0, 199.5}) {
    const double x = curve.at_rank(r);
    const double back = model::drift_cumulative(p, x);
    // Interpolation noise shows up as an absolute wobble in P.
    CHECK(std::fabs(back - (1.0 - r / 200.0)) <= 1e-4);
  }
}

TEST_CASE("fast drift rank curve tracks the adaptive one") {
  ModelParams p = params(1.1, 0.05, 10.0, 0.25);
  p.n_c = 150;
  const model::DriftRankCurve fast(p, 150, true);
  const model::DriftRankCurve slow(p, 150, false);
  for (double r : {0.5, 5.0, 30.0, 75.0, 149.5}) {
    CHECK(std::log(fast.at_rank(r)) ==
          doctest::Approx(std::log(slow.at_rank(r))).epsilon(2e-4));
  }
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(model::cumulative(params(0.0, 1.0, 1.0), 2.0), DomainError);
  CHECK_THROWS_AS(model::cumulative(params(2.1, 1.0, 1.0), 2.0), DomainError);
  CHECK_THROWS_AS(model::cumulative(params(1.0, -1.0, 1.0), 2.0), DomainError);
  CHECK_THROWS_AS(model::cumulative(params(1.0, 1.0, 0.5), 2.0), DomainError);
  CHECK_THROWS_AS(model::cumulative(params(1.0, 1.0, 1.0, -0.1), 2.0),
                  DomainError);
  // Rank curve needs n_c.
  CHECK_THROWS_AS(model::rank_curve(params(1.0, 1.0, 1.0), 1.0), DomainError);
  ModelParams p = params(1.0, 1.0, 1.0);
  p.n_c = 100;
  CHECK_THROWS_AS(model::rank_curve(p, 0.0), DomainError);
  CHECK_THROWS_AS(model::rank_curve(p, 101.0), DomainError);
}
