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

#include "oracles.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace oracles {
namespace {

double simpson_step(const std::function<double(double)>& f, double a,
                    double b, double fa, double fm, double fb, double whole,
                    double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  // Halving tol each level eventually asks for more than the panel sums can
  // resolve in doubles; past that floor delta is round-off noise and further
  // splitting only multiplies work.
  const double floor = 30.0 * std::numeric_limits<double>::epsilon() *
                       (std::fabs(left) + std::fabs(right));
  if (std::fabs(delta) <= std::max(15.0 * tol, floor) || !(a < m && m < b)) {
    return left + right + delta / 15.0;
  }
  if (depth >= 60) throw std::runtime_error("simpson: depth exhausted");
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

}  // namespace

double simpson(const std::function<double(double)>& f, double a, double b,
               double tol) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, tol, 0);
}

double upper_gamma(double a, double z) {
  if (!(z > 0.0)) throw std::invalid_argument("upper_gamma oracle: z <= 0");
  // After t = z e^s the integrand is z^a exp(a s - z e^s); it dies once
  // z e^s passes every scale in the problem.
  const double t_top = z + 80.0 + 10.0 * std::fabs(a) * std::log(2.0 + z);
  const double s_top = std::log(t_top / z);
  auto g = [&](double s) { return std::exp(a * s - z * std::exp(s)); };
  // Magnitude estimate for a relative tolerance: the integrand at s = 0
  // times a unit width, floored to dodge a zero tolerance.
  const double scale = std::max(g(0.0), 1e-300);
  const double raw = simpson(g, 0.0, s_top, 1e-14 * scale * s_top);
  return std::pow(z, a) * raw;
}

double log_moment(int n, double q, double lambda) {
  if (n < 0) throw std::invalid_argument("log_moment oracle: n < 0");
  const double a = 1.0 - q;
  const double lnl = std::log(lambda);
  // t = e^v turns t^{a-1} e^{-t} dt into exp(a v - e^v) dv.
  const double t_top =
      lambda + 90.0 + 10.0 * (std::fabs(a) + n) * std::log(2.0 + lambda);
  const double v_top = std::log(t_top);
  auto f = [&](double v) {
    return std::pow(v - lnl, n) * std::exp(a * v - std::exp(v));
  };
  const double scale = std::max(std::exp(a * lnl - lambda), 1e-300);
  const double num =
      simpson(f, lnl, v_top, 1e-14 * scale * (v_top - lnl));
  auto f0 = [&](double v) { return std::exp(a * v - std::exp(v)); };
  const double den =
      simpson(f0, lnl, v_top, 1e-14 * scale * (v_top - lnl));
  return num / den;
}

double ks_critical_1pct(long long n) {
  return 1.628 / std::sqrt(static_cast<double>(n));
}

double gamma_half(double z) {
  return std::sqrt(M_PI) * std::erfc(std::sqrt(z));
}

double gamma_minus_half(double z) {
  // From the recurrence Gamma(1/2, z) = -1/2 Gamma(-1/2, z) + e^{-z}/sqrt(z).
  return 2.0 * (std::exp(-z) / std::sqrt(z) - gamma_half(z));
}

}  // namespace oracles
