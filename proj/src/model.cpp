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

#include "model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>

#include "errors.hpp"
#include "quadrature.hpp"
#include "specfun.hpp"

namespace rankent {

void validate(const ModelParams& p) {
  if (!std::isfinite(p.q) || !(p.q > 0.0) || p.q > 2.0) {
    throw DomainError("params: q must be in (0, 2], got " + std::to_string(p.q));
  }
  if (!std::isfinite(p.lambda) || !(p.lambda > 0.0)) {
    throw DomainError("params: lambda must be > 0");
  }
  if (!std::isfinite(p.x0) || p.x0 < 1.0) {
    throw DomainError("params: x0 must be >= 1, got " + std::to_string(p.x0));
  }
  if (!std::isfinite(p.sigma) || p.sigma < 0.0) {
    throw DomainError("params: sigma must be >= 0");
  }
  if (p.n_c != 0 && p.n_c < 2) {
    throw DomainError("params: n_c must be >= 2 when set");
  }
  if (p.n_total != 0.0 && (!std::isfinite(p.n_total) || p.n_total <= 0.0)) {
    throw DomainError("params: n_total must be > 0 when set");
  }
  if (p.n_total != 0.0 && p.n_c != 0 && p.sigma == 0.0 &&
      p.n_total < static_cast<double>(p.n_c) * p.x0 * (1.0 - 1e-12)) {
    throw DomainError(
        "params: n_total < n_c * x0 is unreachable for any lambda at sigma=0");
  }
}

RankedSample make_ranked_sample(std::vector<double> sizes, std::string label) {
  if (sizes.size() < 2) {
    throw DomainError("ranked sample needs at least 2 entries");
  }
  for (double v : sizes) {
    if (!std::isfinite(v) || v <= 0.0) {
      throw DomainError("ranked sample entries must be finite and > 0");
    }
  }
  std::sort(sizes.begin(), sizes.end(), std::greater<double>());
  RankedSample out;
  out.ranks.resize(sizes.size());
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    out.ranks[i] = static_cast<double>(i) + 0.5;
  }
  out.sizes = std::move(sizes);
  out.label = std::move(label);
  return out;
}

}  // namespace rankent

namespace rankent::model {
namespace {

constexpr double kLnSqrt2Pi = 0.91893853320467274178032973640562;

double ln_norm(const ModelParams& p) {
  // ln Z = (q-1) ln(lambda/x0) + ln Gamma(1-q, lambda)
  return (p.q - 1.0) * (std::log(p.lambda) - std::log(p.x0)) +
         specfun::upper_gamma_ln(1.0 - p.q, p.lambda);
}

// Gauss-Legendre nodes/weights on [-1, 1], computed once per order by Newton
// iteration on the Legendre recurrence.
const std::array<std::array<double, 64>, 2>& gauss_legendre_64() {
  static const std::array<std::array<double, 64>, 2> table = [] {
    std::array<std::array<double, 64>, 2> t{};
    const int n = 64;
    for (int i = 0; i < (n + 1) / 2; ++i) {
      double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      double pp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = 0.0;
        for (int j = 0; j < n; ++j) {
          const double p2 = p1;
          p1 = p0;
          p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
        }
        pp = n * (x * p0 - p1) / (x * x - 1.0);
        const double dx = p0 / pp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      t[0][i] = -x;
      t[0][n - 1 - i] = x;
      t[1][i] = 2.0 / ((1.0 - x * x) * pp * pp);
      t[1][n - 1 - i] = t[1][i];
    }
    return t;
  }();
  return table;
}

void require_n_c(const ModelParams& p, const char* who) {
  if (p.n_c < 2) {
    throw DomainError(std::string(who) + ": params.n_c must be set (>= 2)");
  }
}

// P_0 extended by 0 below the support, in terms of u' = ln(x'/x0).
double cum0_extended(const ModelParams& p, double lnx_over_x0,
                     double ln_gamma_at_lambda) {
  if (lnx_over_x0 <= 0.0) return 0.0;
  const double z = p.lambda * std::exp(lnx_over_x0);
  const double lg = specfun::upper_gamma_ln(1.0 - p.q, z);
  return -std::expm1(lg - ln_gamma_at_lambda);
}

// Hermite interpolant of y -> ln Gamma(a, e^y).  A drift-curve build asks
// for tens of thousands of incomplete-gamma values along one order a; the
// table amortizes them to one evaluation per 1/16 log-unit.  The derivative
// is analytic: d/dy ln Gamma(a, e^y) = -exp(a y - e^y - ln Gamma(a, e^y)).
class LogGammaLnTable {
 public:
  LogGammaLnTable(double a, double y_lo, double y_hi) : a_(a), y0_(y_lo) {
    const double span = std::max(y_hi - y_lo, 0.5);
    n_ = std::min(static_cast<int>(span / 0.0625) + 2, 4000);
    step_ = span / (n_ - 1);
    g_.resize(n_);
    dg_.resize(n_);
    for (int i = 0; i < n_; ++i) {
      const double y = y0_ + step_ * i;
      const double z = std::exp(y);
      g_[i] = specfun::upper_gamma_ln(a_, z);
      dg_[i] = -std::exp(a_ * y - z - g_[i]);
    }
  }

  double front() const { return g_.front(); }
  double y_max() const { return y0_ + step_ * (n_ - 1); }

  double operator()(double y) const {
    const double s = (y - y0_) / step_;
    if (s <= 0.0) return g_.front();
    if (s >= static_cast<double>(n_ - 1)) return g_.back();
    const int j = static_cast<int>(s);
    const double t = s - j;
    const double h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
    const double h10 = t * (1.0 - t) * (1.0 - t);
    const double h01 = t * t * (3.0 - 2.0 * t);
    const double h11 = t * t * (t - 1.0);
    return h00 * g_[j] + h10 * step_ * dg_[j] + h01 * g_[j + 1] +
           h11 * step_ * dg_[j + 1];
  }

 private:
  double a_, y0_, step_;
  int n_ = 0;
  std::vector<double> g_, dg_;
};

}  // namespace

double density(const ModelParams& p, double x) {
  validate(p);
  if (!std::isfinite(x) || x <= 0.0) {
    throw DomainError("density: x must be > 0");
  }
  if (p.sigma == 0.0) {
    if (x < p.x0) return 0.0;  // support convention
    const double lnp = -p.lambda * x / p.x0 - p.q * std::log(x) - ln_norm(p);
    return std::exp(lnp);
  }
  // Convolution with the log-normal kernel, in s = ln(x'/x0):
  //   p(x) = C / (x sigma sqrt(2pi)) *
  //          int_0^inf exp(-lambda e^s + (1-q) s - (s-u)^2 / (2 sigma^2)) ds
  // with u = ln(x/x0) and ln C = -(q-1) ln lambda - ln Gamma(1-q, lambda).
  const double u = std::log(x / p.x0);
  const double s2 = p.sigma * p.sigma;
  const double center = u + (1.0 - p.q) * s2;
  const double lo = std::max(0.0, center - 13.0 * p.sigma);
  const double hi = std::max(center + 13.0 * p.sigma, lo + 8.0 * p.sigma);
  auto phi = [&](double s) {
    const double d = s - u;
    return -p.lambda * std::exp(s) + (1.0 - p.q) * s - d * d / (2.0 * s2);
  };
  // Shift exponents by the max over a coarse scan so the adaptive pass works
  // near O(1) magnitudes even when p(x) itself underflows.
  double shift = phi(lo);
  for (int i = 1; i <= 16; ++i) {
    shift = std::max(shift, phi(lo + (hi - lo) * i / 16.0));
  }
  const double integral = quad::integrate(
      [&](double s) { return std::exp(phi(s) - shift); }, lo, hi, 1e-10);
  const double ln_c =
      -(p.q - 1.0) * std::log(p.lambda) -
      specfun::upper_gamma_ln(1.0 - p.q, p.lambda);
  const double lnp = ln_c + shift + std::log(integral) - std::log(x) -
                     std::log(p.sigma) - kLnSqrt2Pi;
  return std::exp(lnp);
}

double cumulative(const ModelParams& p, double x) {
  validate(p);
  if (p.sigma != 0.0) {
    throw DomainError(
        "cumulative: closed form requires sigma = 0 (see drift_cumulative)");
  }
  if (!std::isfinite(x) || x < p.x0) {
    throw DomainError("cumulative: x must be >= x0");
  }
  const double a = 1.0 - p.q;
  const double lg_x = specfun::upper_gamma_ln(a, p.lambda * x / p.x0);
  const double lg_0 = specfun::upper_gamma_ln(a, p.lambda);
  return -std::expm1(lg_x - lg_0);
}

double rank_curve(const ModelParams& p, double r) {
  validate(p);
  require_n_c(p, "rank_curve");
  if (p.sigma != 0.0) {
    throw DomainError("rank_curve: requires sigma = 0");
  }
  if (!std::isfinite(r) || !(r > 0.0) ||
      r > static_cast<double>(p.n_c) * (1.0 + 1e-12)) {
    throw DomainError("rank_curve: rank must satisfy 0 < r <= n_c");
  }
  const double a = 1.0 - p.q;
  const double ln_y = specfun::upper_gamma_ln(a, p.lambda) +
                      std::log(r / static_cast<double>(p.n_c));
  double z;
  specfun::inverse_upper_gamma_sorted(a, &ln_y, &z, 1);
  // x(r) >= x0 on 0 < r <= n_c; round-off at the r = n_c edge may land a hair
  // below, which cumulative() would then reject.
  return std::max(p.x0, p.x0 * z / p.lambda);
}

void rank_curve(const ModelParams& p, const double* ranks, double* x,
                std::size_t n) {
  validate(p);
  require_n_c(p, "rank_curve");
  if (p.sigma != 0.0) {
    throw DomainError("rank_curve: requires sigma = 0");
  }
  const double a = 1.0 - p.q;
  const double lg = specfun::upper_gamma_ln(a, p.lambda);
  std::vector<double> ln_y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ranks[i];
    if (!std::isfinite(r) || !(r > 0.0) ||
        r > static_cast<double>(p.n_c) * (1.0 + 1e-12)) {
      throw DomainError("rank_curve: rank must satisfy 0 < r <= n_c");
    }
    ln_y[i] = lg + std::log(r / static_cast<double>(p.n_c));
  }
  // The batch inverter wants ascending targets; callers may not sort.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return ln_y[i] < ln_y[j];
  });
  std::vector<double> sorted_y(n), z(n);
  for (std::size_t i = 0; i < n; ++i) sorted_y[i] = ln_y[order[i]];
  specfun::inverse_upper_gamma_sorted(a, sorted_y.data(), z.data(), n);
  const double scale = p.x0 / p.lambda;
  // Same support-edge clamp as the scalar overload.
  for (std::size_t i = 0; i < n; ++i) {
    x[order[i]] = std::max(p.x0, scale * z[i]);
  }
}

ScaledCurve gamma_scale(const RankedSample& sample, const ModelParams& p) {
  validate(p);
  if (std::abs(p.q - 1.0) > 1e-9) {
    throw DomainError("gamma_scale: defined only at q = 1");
  }
  if (p.sigma != 0.0) {
    throw DomainError("gamma_scale: requires sigma = 0");
  }
  if (sample.sizes.size() != sample.ranks.size() || sample.sizes.empty()) {
    throw DomainError("gamma_scale: malformed ranked sample");
  }
  const double g0 = specfun::upper_gamma(0.0, p.lambda);
  const double n_c = static_cast<double>(sample.n_c());
  ScaledCurve out;
  out.label = sample.label;
  out.ranks.reserve(sample.n_c());
  out.sizes.reserve(sample.n_c());
  for (std::size_t i = 0; i < sample.sizes.size(); ++i) {
    out.ranks.push_back(sample.ranks[i] * g0 / n_c);
    out.sizes.push_back(sample.sizes[i] * p.lambda / p.x0);
  }
  return out;
}

double equation_of_state_mean(const ModelParams& p) {
  validate(p);
  const double ln_mean = specfun::upper_gamma_ln(2.0 - p.q, p.lambda) -
                         specfun::upper_gamma_ln(1.0 - p.q, p.lambda) -
                         std::log(p.lambda) + 0.5 * p.sigma * p.sigma;
  return std::exp(ln_mean);
}

double solve_lambda(double n_total, long long n_c, double x0, double q,
                    double sigma) {
  // n_total stays out of the probe: infeasible aggregates must surface as
  // InfeasibleError below, not as a validation failure.
  ModelParams probe{q, 1.0, x0, sigma, n_c, 0.0};
  validate(probe);
  if (n_c < 2) throw DomainError("solve_lambda: n_c must be >= 2");
  if (!(n_total > 0.0)) throw DomainError("solve_lambda: n_total must be > 0");
  const double target = n_total / (static_cast<double>(n_c) * x0);
  const double infimum = std::exp(0.5 * sigma * sigma);
  if (target <= infimum * (1.0 + 1e-12)) {
    throw InfeasibleError(
        "solve_lambda: n_total/(n_c*x0) = " + std::to_string(target) +
        " is at or below the large-lambda limit " + std::to_string(infimum) +
        "; x0 is too large for this mean");
  }
  auto mean_at = [&](double ln_lambda) {
    probe.lambda = std::exp(ln_lambda);
    return equation_of_state_mean(probe);
  };
  // mean is strictly decreasing in lambda, diverging as lambda -> 0.
  double lo = 0.0, hi = 0.0;
  if (mean_at(0.0) > target) {
    lo = 0.0;
    hi = 2.0;
    while (mean_at(hi) > target) {
      lo = hi;
      hi += 2.0;
      if (hi > 700.0) {
        throw ConvergenceError("solve_lambda: no bracket below lambda=e^700");
      }
    }
  } else {
    hi = 0.0;
    lo = -2.0;
    while (mean_at(lo) < target) {
      hi = lo;
      lo -= 2.0;
      if (lo < -700.0) {
        throw ConvergenceError(
            "solve_lambda: target mean not reached above lambda=e^-700");
      }
    }
  }
  for (int i = 0; i < 200 && hi - lo > 1e-14; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mean_at(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double lambda = std::exp(0.5 * (lo + hi));
  probe.lambda = lambda;
  const double resid =
      std::abs(equation_of_state_mean(probe) - target) / target;
  if (!(resid <= 1e-8)) {
    throw ConvergenceError("solve_lambda: residual " + std::to_string(resid) +
                           " exceeds tolerance");
  }
  return lambda;
}

double drift_cumulative(const ModelParams& p, double x, bool fast) {
  validate(p);
  if (!std::isfinite(x) || x <= 0.0) {
    throw DomainError("drift_cumulative: x must be > 0");
  }
  if (p.sigma == 0.0) {
    return (x < p.x0) ? 0.0 : cumulative(p, x);
  }
  const double lg0 = specfun::upper_gamma_ln(1.0 - p.q, p.lambda);
  const double u = std::log(x / p.x0);
  // P(x) = int phi(t) P_0(x e^{-sigma t}) dt over t < u/sigma.
  const double t_hi = std::min(13.0, u / p.sigma);
  const double t_lo = -13.0;
  if (t_hi <= t_lo) return 0.0;
  auto f = [&](double t) {
    const double w = std::exp(-0.5 * t * t - kLnSqrt2Pi);
    return w * cum0_extended(p, u - p.sigma * t, lg0);
  };
  if (!fast) {
    return quad::integrate(f, t_lo, t_hi, 1e-9, 1e-14);
  }
  const auto& gl = gauss_legendre_64();
  const double c = 0.5 * (t_lo + t_hi);
  const double h = 0.5 * (t_hi - t_lo);
  double acc = 0.0;
  for (int i = 0; i < 64; ++i) {
    acc += gl[1][i] * f(c + h * gl[0][i]);
  }
  return acc * h;
}

DriftRankCurve::DriftRankCurve(const ModelParams& p, long long n_c, bool fast)
    : x0_(p.x0), n_c_(static_cast<double>(n_c)) {
  validate(p);
  if (n_c < 2) throw DomainError("DriftRankCurve: n_c must be >= 2");
  const double p_floor = 0.125 / n_c_;
  const double q_floor = 0.125 / n_c_;

  const double a = 1.0 - p.q;
  std::optional<LogGammaLnTable> table;
  if (fast && p.sigma > 0.0) {
    // Table spans from lambda up past the point where the tail probability
    // is two orders below the resolution floor, plus the kernel reach.
    const double lg0 = specfun::upper_gamma_ln(a, p.lambda);
    const double log_target = lg0 + std::log(0.001 / n_c_);
    double z_top = 0.0;
    specfun::inverse_upper_gamma_sorted(a, &log_target, &z_top, 1);
    const double y_top =
        std::min(std::log(z_top) + 13.0 * p.sigma + 1.0, 690.0);
    table.emplace(a, std::log(p.lambda), y_top);
  }
  const auto& gl = gauss_legendre_64();
  auto cum = [&](double u) {
    if (!table) return drift_cumulative(p, x0_ * std::exp(u), fast);
    const double lg0 = table->front();
    const double t_hi = std::min(13.0, u / p.sigma);
    if (t_hi <= -13.0) return 0.0;
    const double c = 0.5 * (-13.0 + t_hi);
    const double h = 0.5 * (t_hi + 13.0);
    const double ln_lambda = std::log(p.lambda);
    double acc = 0.0;
    for (int i = 0; i < 64; ++i) {
      const double t = c + h * gl[0][i];
      const double arg = u - p.sigma * t;
      if (arg <= 0.0) continue;
      const double y = ln_lambda + arg;
      // Past the table the tail mass is far below the resolution floor;
      // treating it as exactly exhausted (P_0 = 1) is lossless there.
      const double lg = y <= table->y_max()
                            ? (*table)(y)
                            : (y > 690.0
                                   ? -std::numeric_limits<double>::infinity()
                                   : specfun::upper_gamma_ln(a, std::exp(y)));
      acc += gl[1][i] * std::exp(-0.5 * t * t - kLnSqrt2Pi) *
             -std::expm1(lg - lg0);
    }
    return acc * h;
  };

  // Bracket the span of u = ln(x/x0) needed to cover tail probabilities
  // [0.5/n_c, 1 - 0.5/n_c] with margin on both sides.
  const double step = std::max(p.sigma, 0.25);
  double u_lo = 0.0;
  for (int i = 0; i < 400 && cum(u_lo) > p_floor; ++i) u_lo -= step;
  double u_hi = step;
  for (int i = 0; i < 2000 && 1.0 - cum(u_hi) > q_floor; ++i) u_hi += step;
  u_lo -= 0.5 * step;
  u_hi += 0.5 * step;

  const int n_nodes = 181;
  w_.resize(n_nodes);
  u_.resize(n_nodes);
  double prev_w = -1e308;
  for (int i = 0; i < n_nodes; ++i) {
    const double u = u_lo + (u_hi - u_lo) * i / (n_nodes - 1);
    double c = cum(u);
    c = std::min(std::max(c, 1e-300), 1.0 - 1e-15);
    double w = std::log(c) - std::log1p(-c);
    if (w <= prev_w) w = prev_w + 1e-11;  // enforce strict monotonicity
    prev_w = w;
    w_[i] = w;
    u_[i] = u;
  }
  // Fritsch-Carlson monotone cubic slopes for u(w).
  const int n = n_nodes;
  std::vector<double> d(n - 1);
  for (int i = 0; i + 1 < n; ++i) {
    d[i] = (u_[i + 1] - u_[i]) / (w_[i + 1] - w_[i]);
  }
  slope_.assign(n, 0.0);
  slope_[0] = d[0];
  slope_[n - 1] = d[n - 2];
  for (int i = 1; i + 1 < n; ++i) {
    slope_[i] = (d[i - 1] + d[i]) * 0.5;
  }
  for (int i = 0; i + 1 < n; ++i) {
    if (d[i] == 0.0) {
      slope_[i] = slope_[i + 1] = 0.0;
      continue;
    }
    const double alpha = slope_[i] / d[i];
    const double beta = slope_[i + 1] / d[i];
    const double s = alpha * alpha + beta * beta;
    if (s > 9.0) {
      const double tau = 3.0 / std::sqrt(s);
      slope_[i] = tau * alpha * d[i];
      slope_[i + 1] = tau * beta * d[i];
    }
  }
}

double DriftRankCurve::at_rank(double r) const {
  if (!(r > 0.0) || r > n_c_ * (1.0 + 1e-12)) {
    throw DomainError("DriftRankCurve: rank must satisfy 0 < r <= n_c");
  }
  const double cprob = std::max(1.0 - r / n_c_, 1e-300);
  const double tail = std::max(r / n_c_, 1e-300);
  const double w = std::log(cprob) - std::log(tail);
  // Clamped lookup; targets outside the table only occur at the extreme
  // half-rank margins and are pinned to the table ends.
  if (w <= w_.front()) return x0_ * std::exp(u_.front());
  if (w >= w_.back()) return x0_ * std::exp(u_.back());
  std::size_t j =
      std::upper_bound(w_.begin(), w_.end(), w) - w_.begin() - 1;
  const double h = w_[j + 1] - w_[j];
  const double t = (w - w_[j]) / h;
  const double h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
  const double h10 = t * (1.0 - t) * (1.0 - t);
  const double h01 = t * t * (3.0 - 2.0 * t);
  const double h11 = t * t * (t - 1.0);
  const double u = h00 * u_[j] + h10 * h * slope_[j] + h01 * u_[j + 1] +
                   h11 * h * slope_[j + 1];
  return x0_ * std::exp(u);
}

}  // namespace rankent::model
