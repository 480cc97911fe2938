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

#include "dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "errors.hpp"

namespace rankent::dynamics {
namespace {

struct ProfileFit {
  double sse = std::numeric_limits<double>::infinity();
  double alpha = 0.0;  // constant term
  double beta = 0.0;   // coefficient of exp((q-1)(u - u_mean))
  double cov_aa = 0.0;
  double cov_bb = 0.0;
  double cov_ab = 0.0;
  bool constant_only = false;
};

// Linear least squares of y on {1, exp((q-1)(u - u_mean))}.  The shifted
// exponent keeps the normal equations well scaled for q far from 1.  The
// cov_* entries are the unscaled (sigma^2 = 1) parameter covariances.
ProfileFit profile_at_q(double q, const std::vector<double>& u, double u_mean,
                        const std::vector<double>& y,
                        const std::vector<double>& w) {
  const std::size_t n = u.size();
  double sw = 0.0, se = 0.0, see = 0.0, sy = 0.0, sey = 0.0;
  std::vector<double> e(n);
  for (std::size_t i = 0; i < n; ++i) {
    e[i] = std::exp((q - 1.0) * (u[i] - u_mean));
    sw += w[i];
    se += w[i] * e[i];
    see += w[i] * e[i] * e[i];
    sy += w[i] * y[i];
    sey += w[i] * e[i] * y[i];
  }
  ProfileFit fit;
  const double det = sw * see - se * se;
  if (!(det > 1e-12 * sw * see)) {
    // Basis columns collinear (q ~ 1); the model collapses to a constant.
    fit.constant_only = true;
    fit.alpha = sy / sw;
    fit.beta = 0.0;
    fit.cov_aa = 1.0 / sw;
  } else {
    fit.alpha = (see * sy - se * sey) / det;
    fit.beta = (sw * sey - se * sy) / det;
    fit.cov_aa = see / det;
    fit.cov_bb = sw / det;
    fit.cov_ab = -se / det;
  }
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - fit.alpha - fit.beta * e[i];
    sse += w[i] * r * r;
  }
  fit.sse = sse;
  return fit;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
    sab += (a[i] - ma) * (b[i] - mb);
  }
  if (saa <= 0.0 || sbb <= 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

std::vector<DynamicsPoint> panel_to_points(
    const std::vector<PanelRecord>& panel) {
  if (panel.empty()) throw DomainError("panel_to_points: empty panel");
  std::map<std::string, std::vector<std::pair<long long, double>>> series;
  std::map<std::pair<std::string, long long>, bool> seen;
  for (const PanelRecord& rec : panel) {
    if (rec.population < 1) {
      throw DomainError("panel_to_points: unit '" + rec.unit_id + "', year " +
                        std::to_string(rec.year) + " has population " +
                        std::to_string(rec.population) + " (must be >= 1)");
    }
    if (!seen.emplace(std::make_pair(rec.unit_id, rec.year), true).second) {
      throw DomainError("panel_to_points: duplicate (unit '" + rec.unit_id +
                        "', year " + std::to_string(rec.year) + ")");
    }
    series[rec.unit_id].push_back(
        {rec.year, static_cast<double>(rec.population)});
  }
  std::vector<DynamicsPoint> points;
  for (auto& [unit, obs] : series) {
    std::sort(obs.begin(), obs.end());
    for (std::size_t i = 0; i + 1 < obs.size(); ++i) {
      const auto& [t1, x1] = obs[i];
      const auto& [t2, x2] = obs[i + 1];
      DynamicsPoint pt;
      pt.u = 0.5 * (std::log(x1) + std::log(x2));
      pt.udot = std::log(x2 / x1) / static_cast<double>(t2 - t1);
      pt.unit_id = unit;
      pt.period = {t1, t2};
      points.push_back(std::move(pt));
    }
  }
  if (points.empty()) {
    throw DomainError(
        "panel_to_points: no unit is observed in two or more years");
  }
  return points;
}

BinnedDynamics bin_points(const std::vector<DynamicsPoint>& points,
                          double delta_u, double min_frac) {
  if (points.empty()) throw DomainError("bin_points: no points");
  if (!(delta_u > 0.0)) throw DomainError("bin_points: delta_u must be > 0");
  if (!(min_frac >= 0.0)) throw DomainError("bin_points: min_frac must be >= 0");
  double u_min = points[0].u;
  for (const DynamicsPoint& pt : points) u_min = std::min(u_min, pt.u);
  std::map<long long, std::vector<double>> bins;
  for (const DynamicsPoint& pt : points) {
    const auto idx =
        static_cast<long long>(std::floor((pt.u - u_min) / delta_u));
    bins[idx].push_back(pt.udot);
  }
  std::size_t max_count = 0;
  for (const auto& [idx, vals] : bins) max_count = std::max(max_count, vals.size());
  const double threshold = min_frac * static_cast<double>(max_count);
  BinnedDynamics out;
  out.delta_u = delta_u;
  for (const auto& [idx, vals] : bins) {
    if (static_cast<double>(vals.size()) < threshold) continue;
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= static_cast<double>(vals.size());
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    const double sd =
        vals.size() > 1
            ? std::sqrt(var / static_cast<double>(vals.size() - 1))
            : 0.0;
    out.bin_center.push_back(u_min + (static_cast<double>(idx) + 0.5) * delta_u);
    out.mean_udot.push_back(mean);
    out.std_udot.push_back(sd);
    out.count.push_back(static_cast<long long>(vals.size()));
  }
  if (out.bin_center.empty()) {
    throw DomainError("bin_points: the count filter removed every bin");
  }
  return out;
}

DynamicsFit fit_dynamics(const BinnedDynamics& binned, bool weighted) {
  const std::size_t n = binned.bin_center.size();
  if (n < 4) {
    throw DomainError("fit_dynamics: needs >= 4 bins, got " +
                      std::to_string(n));
  }
  const std::vector<double>& u = binned.bin_center;
  const std::vector<double>& y = binned.mean_udot;
  std::vector<double> w(n, 1.0);
  if (weighted) {
    // Weight by inverse squared standard error of the bin mean; zero or
    // missing spreads get a floor tied to the largest spread so a bin
    // cannot dominate through an accidental zero.
    double sd_max = 0.0;
    for (double s : binned.std_udot) sd_max = std::max(sd_max, s);
    const double floor_sd = std::max(1e-6 * sd_max, 1e-300);
    for (std::size_t i = 0; i < n; ++i) {
      const double sd = std::max(binned.std_udot[i], floor_sd);
      w[i] = static_cast<double>(binned.count[i]) / (sd * sd);
    }
  }
  double u_mean = 0.0;
  for (double v : u) u_mean += v;
  u_mean /= static_cast<double>(n);

  auto eval = [&](double q) { return profile_at_q(q, u, u_mean, y, w); };

  double best_q = 1.0;
  ProfileFit best;
  for (int i = 0; i <= 100; ++i) {
    const double q = 0.025 * static_cast<double>(i);  // 0 .. 2.5
    ProfileFit f = eval(q);
    if (f.sse < best.sse) {
      best = f;
      best_q = q;
    }
  }
  // Golden-section polish around the best grid node.
  {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = best_q - 0.025, b = best_q + 0.025;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = eval(x1).sse, f2 = eval(x2).sse;
    for (int it = 0; it < 80 && (b - a) > 1e-11; ++it) {
      if (f1 < f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - gr * (b - a);
        f1 = eval(x1).sse;
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + gr * (b - a);
        f2 = eval(x2).sse;
      }
    }
    const double q = 0.5 * (a + b);
    ProfileFit f = eval(q);
    if (f.sse <= best.sse) {
      best = f;
      best_q = q;
    }
  }

  DynamicsFit fit;
  fit.n_bins = static_cast<long long>(n);
  fit.q = best_q;
  fit.sse = best.sse;
  const double shift = std::exp(-(best_q - 1.0) * u_mean);
  fit.k1 = best.alpha;
  fit.kq = best.beta * shift;
  const double dof = static_cast<double>(n > 3 ? n - 3 : 1);
  const double sigma2 = best.sse / dof;
  fit.k1_std = std::sqrt(std::max(0.0, sigma2 * best.cov_aa));
  fit.kq_std = std::sqrt(std::max(0.0, sigma2 * best.cov_bb)) * shift;
  if (!best.constant_only) {
    // The quoted spreads must account for the trade against q.  Around the
    // optimum the model is alpha + beta*e with e = exp((q-1)(u - u_mean)),
    // and the q column of the Jacobian is beta*(u - u_mean)*e.  beta scales
    // out of the projections below, so they stay stable near beta = 0, which
    // is exactly where the trade is worst and the conditional-on-q spread
    // understates the real one enough to pass a rate that is pure noise.
    std::vector<double> e(n), g(n), ones(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      e[i] = std::exp((best_q - 1.0) * (u[i] - u_mean));
      g[i] = (u[i] - u_mean) * e[i];
    }
    auto dot = [&](const std::vector<double>& x,
                   const std::vector<double>& y) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += w[i] * x[i] * y[i];
      return s;
    };
    // Unscaled marginal variance of col's coefficient: 1 / |col_perp|^2
    // with col_perp the residual of col after projecting onto {o1, o2}.
    // NaN when {o1, o2} is itself collinear (no usable projection),
    // infinity when col lies inside the span (coefficient unidentified).
    auto marginal = [&](const std::vector<double>& col,
                        const std::vector<double>& o1,
                        const std::vector<double>& o2) {
      const double a11 = dot(o1, o1), a12 = dot(o1, o2), a22 = dot(o2, o2);
      const double b1 = dot(o1, col), b2 = dot(o2, col);
      const double det = a11 * a22 - a12 * a12;
      if (!(det > 1e-14 * a11 * a22)) {
        return std::numeric_limits<double>::quiet_NaN();
      }
      const double c1 = (a22 * b1 - a12 * b2) / det;
      const double c2 = (a11 * b2 - a12 * b1) / det;
      const double perp = dot(col, col) - c1 * b1 - c2 * b2;
      if (!(perp > 0.0)) return std::numeric_limits<double>::infinity();
      return 1.0 / perp;
    };
    auto apply = [&](double var_unscaled, double scale, double fallback) {
      if (std::isnan(var_unscaled)) return fallback;
      if (std::isinf(var_unscaled)) {
        return std::numeric_limits<double>::infinity();
      }
      return std::sqrt(sigma2 * var_unscaled) * scale;
    };
    fit.kq_std = apply(marginal(e, ones, g), shift, fit.kq_std);
    fit.k1_std = apply(marginal(ones, e, g), 1.0, fit.k1_std);
  }
  // Spread of q from the curvature of the profiled objective.
  {
    const double h = 1e-3;
    const double c =
        eval(best_q + h).sse - 2.0 * best.sse + eval(best_q - h).sse;
    const double curv = c / (h * h);
    fit.q_std = curv > 0.0 ? std::sqrt(2.0 * sigma2 / curv)
                           : std::numeric_limits<double>::infinity();
  }
  {
    std::vector<double> fitted(n);
    for (std::size_t i = 0; i < n; ++i) {
      fitted[i] = fit.k1 + fit.kq * std::exp((fit.q - 1.0) * u[i]);
    }
    fit.correlation = pearson(y, fitted);
  }
  const bool degenerate = best.constant_only || !std::isfinite(fit.kq) ||
                          fit.kq == 0.0 ||
                          std::fabs(fit.kq) < 2.0 * fit.kq_std;
  fit.well_defined = !degenerate;
  if (degenerate) fit.q = 1.0;
  return fit;
}

LinearDynamicsFit fit_dynamics_linear(const BinnedDynamics& binned) {
  const std::size_t n = binned.bin_center.size();
  if (n < 2) throw DomainError("fit_dynamics_linear: needs >= 2 bins");
  const std::vector<double>& u = binned.bin_center;
  const std::vector<double>& y = binned.mean_udot;
  double mu = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mu += u[i];
    my += y[i];
  }
  mu /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double suu = 0.0, suy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    suu += (u[i] - mu) * (u[i] - mu);
    suy += (u[i] - mu) * (y[i] - my);
  }
  LinearDynamicsFit fit;
  if (suu <= 0.0) {
    fit.intercept = my;
    return fit;
  }
  fit.slope = suy / suu;
  fit.intercept = my - fit.slope * mu;
  fit.correlation = pearson(u, y);
  return fit;
}

}  // namespace rankent::dynamics
