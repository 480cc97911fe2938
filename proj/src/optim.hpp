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

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace rankent::optim {

struct MinResult {
  std::vector<double> x;
  double f = std::numeric_limits<double>::infinity();
  bool converged = false;
  int evaluations = 0;
};

// Golden-section search on [a, b]; f need not be smooth.
inline double golden_min(const std::function<double(double)>& f, double a,
                         double b, double tol = 1e-10, int max_iter = 200) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < max_iter && (b - a) > tol; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

// Nelder-Mead with standard coefficients.  `step` sets the initial simplex
// edge per coordinate.  Objectives may return +inf to reject a point.
inline MinResult nelder_mead(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& x0, const std::vector<double>& step,
    double ftol = 1e-12, double xtol = 1e-10, int max_iter = 4000) {
  const std::size_t n = x0.size();
  MinResult res;
  std::vector<std::vector<double>> pts(n + 1, x0);
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step[i];
  for (std::size_t i = 0; i <= n; ++i) {
    fv[i] = f(pts[i]);
    ++res.evaluations;
  }
  std::vector<std::size_t> order(n + 1);
  for (int iter = 0; iter < max_iter; ++iter) {
    for (std::size_t i = 0; i <= n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t lo = order[0], hi = order[n], nh = order[n - 1];
    double spread_x = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      spread_x = std::max(spread_x, std::fabs(pts[hi][j] - pts[lo][j]));
    }
    const double spread_f = std::fabs(fv[hi] - fv[lo]);
    if (spread_f <= ftol * (std::fabs(fv[lo]) + ftol) && spread_x <= xtol) {
      res.converged = true;
      res.x = pts[lo];
      res.f = fv[lo];
      return res;
    }
    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == hi) continue;
      for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j];
    }
    for (double& c : centroid) c /= static_cast<double>(n);
    auto blend = [&](double t) {
      std::vector<double> p(n);
      for (std::size_t j = 0; j < n; ++j) {
        p[j] = centroid[j] + t * (pts[hi][j] - centroid[j]);
      }
      return p;
    };
    std::vector<double> refl = blend(-1.0);
    double f_refl = f(refl);
    ++res.evaluations;
    if (f_refl < fv[lo]) {
      std::vector<double> exp_p = blend(-2.0);
      double f_exp = f(exp_p);
      ++res.evaluations;
      if (f_exp < f_refl) {
        pts[hi] = std::move(exp_p);
        fv[hi] = f_exp;
      } else {
        pts[hi] = std::move(refl);
        fv[hi] = f_refl;
      }
      continue;
    }
    if (f_refl < fv[nh]) {
      pts[hi] = std::move(refl);
      fv[hi] = f_refl;
      continue;
    }
    const bool outside = f_refl < fv[hi];
    std::vector<double> contr = blend(outside ? -0.5 : 0.5);
    double f_contr = f(contr);
    ++res.evaluations;
    if (f_contr < std::min(f_refl, fv[hi])) {
      pts[hi] = std::move(contr);
      fv[hi] = f_contr;
      continue;
    }
    // Shrink toward the best vertex.
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == lo) continue;
      for (std::size_t j = 0; j < n; ++j) {
        pts[i][j] = pts[lo][j] + 0.5 * (pts[i][j] - pts[lo][j]);
      }
      fv[i] = f(pts[i]);
      ++res.evaluations;
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    if (fv[i] < fv[best]) best = i;
  }
  res.x = pts[best];
  res.f = fv[best];
  res.converged = false;
  return res;
}

}  // namespace rankent::optim

