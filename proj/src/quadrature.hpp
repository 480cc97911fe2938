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

#include <cmath>
#include <cstddef>
#include <utility>

#include "errors.hpp"

namespace rankent::quad {

// Gauss-Kronrod 7-15 nodes/weights on [-1, 1] (positive half; symmetric).
// Node order: Kronrod points, with xk[i] for i odd being the embedded Gauss
// points (xk[1], xk[3], xk[5], xk[7=0]).
namespace detail {
inline constexpr double xk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr double wk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
inline void gk15(F&& f, double a, double b, double& result, double& err) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double resk = 0.0;
  double resg = 0.0;
  for (int i = 0; i < 7; ++i) {
    const double fv = f(c - h * xk[i]) + f(c + h * xk[i]);
    resk += wk[i] * fv;
    if (i % 2 == 1) resg += wg[i / 2] * fv;
  }
  const double f0 = f(c);
  resk += wk[7] * f0;
  resg += wg[3] * f0;
  result = resk * h;
  err = std::abs((resk - resg) * h);
}
}  // namespace detail

// Adaptive bisection on a finite interval.  `scale` is an external magnitude
// the relative tolerance is measured against (pass 0 to use the interval's
// own estimate); panels whose error is below the split tolerance are frozen.
template <class F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-11,
                 double abs_tol = 0.0, double scale = 0.0, int max_depth = 52) {
  if (!(a < b)) return 0.0;
  double whole, err0;
  detail::gk15(f, a, b, whole, err0);
  const double target =
      std::max(abs_tol, rel_tol * std::max(std::abs(whole), std::abs(scale)));
  if (err0 <= target) return whole;

  struct Panel {
    double a, b, value, err;
    int depth;
  };
  // Explicit stack; worst case max_depth panels pending per level.
  Panel stack[256];
  int top = 0;
  double total = whole;
  double total_err = err0;
  stack[top++] = {a, b, whole, err0, 0};
  while (top > 0) {
    Panel p = stack[--top];
    // Split tolerance is distributed by panel width so that the sum over all
    // leaves stays below the global target.
    const double local =
        target * std::max(1e-3, (p.b - p.a) / (b - a));
    if (p.err <= local || p.depth >= max_depth) {
      if (p.depth >= max_depth && p.err > 64.0 * local) {
        throw ConvergenceError("quadrature did not converge on subinterval");
      }
      continue;
    }
    const double m = 0.5 * (p.a + p.b);
    double v1, e1, v2, e2;
    detail::gk15(f, p.a, m, v1, e1);
    detail::gk15(f, m, p.b, v2, e2);
    total += (v1 + v2) - p.value;
    total_err += (e1 + e2) - p.err;
    if (top + 2 >= 256) throw ConvergenceError("quadrature stack overflow");
    stack[top++] = {p.a, m, v1, e1, p.depth + 1};
    stack[top++] = {m, p.b, v2, e2, p.depth + 1};
  }
  (void)total_err;
  return total;
}

// Semi-infinite integral of an eventually-decaying integrand: geometric
// panels [a, a+h], [a+h, a+3h], ... until two consecutive panels contribute
// less than rel_tol of the running total.
template <class F>
double integrate_decaying(F&& f, double a, double h0, double rel_tol = 1e-11,
                          double span_max = 1.0e6) {
  double total = 0.0;
  double lo = a;
  double h = h0;
  int negligible = 0;
  while (lo < a + span_max) {
    const double hi = lo + h;
    const double piece = integrate(f, lo, hi, rel_tol, 0.0, std::abs(total));
    total += piece;
    if (std::abs(piece) <= rel_tol * std::max(std::abs(total), 1e-300)) {
      if (++negligible >= 2) return total;
    } else {
      negligible = 0;
    }
    lo = hi;
    h *= 2.0;
  }
  throw ConvergenceError("semi-infinite quadrature failed to decay");
}

}  // namespace rankent::quad
