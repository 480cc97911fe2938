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

#include "specfun.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "errors.hpp"
#include "quadrature.hpp"

namespace rankent::specfun {
namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

struct GammaEval {
  double value;  // may underflow to 0 for large z
  double log;    // always finite while the true value is representable in logs
};

GammaEval eval_core(double a, double z);

void check_order(double a) {
  if (!std::isfinite(a) || a < kMinOrder || a > kMaxOrder) {
    throw DomainError("upper_gamma: order a = " + std::to_string(a) +
                      " outside supported range [" + std::to_string(kMinOrder) +
                      ", " + std::to_string(kMaxOrder) + "]");
  }
}

void check_args(double a, double z) {
  check_order(a);
  if (!std::isfinite(z) || !(z > 0.0)) {
    throw DomainError("upper_gamma: z must be finite and > 0, got " +
                      std::to_string(z));
  }
}

// Continued fraction (modified Lentz):
//   Gamma(a,z) = e^{-z} z^a / (z+1-a - 1(1-a)/(z+3-a - 2(2-a)/(...)))
// Reliable for z >= a+1, and for a <= 0 already from z ~ 0.3.
GammaEval eval_cf(double a, double z) {
  constexpr double tiny = 1e-300;
  double b = z + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / (b == 0.0 ? tiny : b);
  double h = d;
  for (int i = 1; i <= 100000; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) <= 1e-15) {
      if (!(h > 0.0)) {
        throw ConvergenceError("upper_gamma: continued fraction lost positivity");
      }
      const double lg = -z + a * std::log(z) + std::log(h);
      return {std::exp(lg), lg};
    }
  }
  throw ConvergenceError("upper_gamma: continued fraction stalled (a=" +
                         std::to_string(a) + ", z=" + std::to_string(z) + ")");
}

// Lower series plus complement, for a > 0.5 and z < a+1 where the
// subtraction Gamma(a) - gamma(a,z) costs at most ~1.5 digits.
GammaEval eval_series_pos(double a, double z) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n <= 500; ++n) {
    term *= z / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-17) break;
  }
  const double lower = sum * std::exp(-z + a * std::log(z));
  const double value = std::tgamma(a) - lower;
  return {value, std::log(value)};
}

// gamma(1+a) - 1, stable near a = 0.  lgamma carries an absolute error of
// order eps near its zero at 1, which 1/a in the pole series would amplify
// without bound; below |a| = 0.01 switch to
//   ln Gamma(1+a) = -gamma_E a + sum_{k>=2} (-1)^k zeta(k) a^k / k,
// whose truncation at k = 9 is below eps * |a| there.
double gamma1pm1(double a) {
  if (std::fabs(a) >= 0.01) return std::expm1(std::lgamma(1.0 + a));
  constexpr double zeta[] = {
      1.6449340668482264365, 1.2020569031595942854, 1.0823232337111381916,
      1.0369277551433699263, 1.0173430619844491397, 1.0083492773819228268,
      1.0040773561979443394, 1.0020083928260822144};
  double s = 0.0;
  double ak = a;
  for (int k = 2; k <= 9; ++k) {
    ak *= a;
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    s += sign * zeta[k - 2] * ak / static_cast<double>(k);
  }
  return std::expm1(-kEulerGamma * a + s);
}

// Power series valid through the a = 0 pole, for a in (-0.5, 0.5] and small z:
//   Gamma(a,z) = C - sum_{k>=1} (-z)^k z^a / (k! (a+k))
//   C = [Gamma(1+a) - z^a] / a  ->  -gamma_E - ln z  as a -> 0.
// C is evaluated as a difference of expm1 terms so the pole cancels exactly.
GammaEval eval_series_pole(double a, double z) {
  const double lnz = std::log(z);
  double c0;
  if (a == 0.0) {
    c0 = -kEulerGamma - lnz;
  } else {
    c0 = (gamma1pm1(a) - std::expm1(a * lnz)) / a;
  }
  double term = std::exp(a * lnz);
  double sum = 0.0;
  for (int k = 1; k <= 300; ++k) {
    term *= -z / k;
    sum += term / (a + k);
    if (std::abs(term) < 1e-18 * std::max(1.0, std::abs(sum))) break;
  }
  const double value = c0 - sum;
  return {value, std::log(value)};
}

// Downward recurrence Gamma(a,z) = (Gamma(a+1,z) - z^a e^{-z}) / a for
// a <= -0.5 at small z, where the subtraction is benign: z^a e^{-z} dominates
// the base term by at least z^{-1}|a| there.
GammaEval eval_recurrence(double a, double z) {
  const double lnz = std::log(z);
  const double t_ln = a * lnz - z;
  if (t_ln > 700.0) {
    // z^a e^{-z} overflows; Gamma(a,z) = -z^a/a to relative error < 1e-250.
    const double lg = a * lnz - std::log(-a);
    return {std::exp(lg), lg};
  }
  const GammaEval base = eval_core(a + 1.0, z);
  const double value = (base.value - std::exp(t_ln)) / a;
  return {value, std::log(value)};
}

GammaEval eval_core(double a, double z) {
  if ((a <= 0.0 && z >= 0.35) || (a > 0.0 && z >= a + 1.0)) {
    return eval_cf(a, z);
  }
  if (a > 0.5) return eval_series_pos(a, z);
  if (a > -0.5) return eval_series_pole(a, z);
  return eval_recurrence(a, z);
}

// Safeguarded Newton in t = ln z for upper_gamma_ln(a, e^t) = ln_y, given a
// bracket with g(t_lo) >= 0 >= g(t_hi).  g is strictly decreasing in t.
double solve_log_bracketed(double a, double ln_y, double t_lo, double t_hi) {
  auto g = [&](double t) { return eval_core(a, std::exp(t)).log - ln_y; };
  double glo = g(t_lo);
  double ghi = g(t_hi);
  if (!(glo >= 0.0 && ghi <= 0.0)) {
    throw ConvergenceError("inverse_upper_gamma: bracket invalid");
  }
  // A few bisections to tame the bracket, then Newton.
  for (int i = 0; i < 20 && t_hi - t_lo > 0.5; ++i) {
    const double tm = 0.5 * (t_lo + t_hi);
    const double gm = g(tm);
    if (gm >= 0.0) {
      t_lo = tm;
      glo = gm;
    } else {
      t_hi = tm;
      ghi = gm;
    }
  }
  double t = (glo <= -ghi) ? t_lo : t_hi;
  double gt = (t == t_lo) ? glo : ghi;
  // Invariant: gt == g(t) on every pass, so an accept can never pair a fresh
  // iterate with a stale residual.
  for (int i = 0; i < 80 && std::abs(gt) > 1e-12; ++i) {
    if (gt >= 0.0) {
      t_lo = t;
    } else {
      t_hi = t;
    }
    // d/dt ln Gamma(a, e^t) = -z^a e^{-z} / Gamma(a,z)
    const double z = std::exp(t);
    const double dg = -std::exp(a * t - z - (gt + ln_y));
    double t_next = t - gt / dg;
    if (!(t_next > t_lo && t_next < t_hi)) {
      t_next = 0.5 * (t_lo + t_hi);
    }
    // A zero step means t is the best representable point; the bracket
    // midpoint degenerates to an endpoint once the interval is one ulp wide.
    if (t_next == t) break;
    t = t_next;
    gt = g(t);
  }
  if (std::abs(gt) <= 1e-9) return std::exp(t);
  throw ConvergenceError("inverse_upper_gamma: Newton stalled (a=" +
                         std::to_string(a) + ", ln_y=" + std::to_string(ln_y) +
                         ")");
}

double inverse_scalar_ln(double a, double ln_y) {
  const double t_floor = std::log(kInverseFloor);
  if (a > 0.0) {
    const double ln_total = std::lgamma(a);
    if (ln_y >= ln_total) {
      throw DomainError(
          "inverse_upper_gamma: y >= Gamma(a); no z > 0 attains it");
    }
  } else {
    const double ln_max = eval_core(a, kInverseFloor).log;
    if (ln_y >= ln_max) {
      throw DomainError(
          "inverse_upper_gamma: y exceeds Gamma(a, z) at the bracketing floor");
    }
  }
  // Upper end: ln Gamma(a,z) ~ -z + (a-1) ln z, so z ~ -ln_y + slack puts us
  // safely past the root.
  double t_hi = std::log(std::max(8.0, -ln_y + 60.0));
  for (int i = 0; i < 200; ++i) {
    if (eval_core(a, std::exp(t_hi)).log < ln_y) break;
    t_hi += 1.0;
    if (i == 199) {
      throw ConvergenceError("inverse_upper_gamma: failed to bracket root");
    }
  }
  return solve_log_bracketed(a, ln_y, t_floor, t_hi);
}

}  // namespace

double upper_gamma(double a, double z) {
  check_args(a, z);
  return eval_core(a, z).value;
}

double upper_gamma_ln(double a, double z) {
  check_args(a, z);
  return eval_core(a, z).log;
}

double inverse_upper_gamma(double a, double y) {
  check_order(a);
  if (!std::isfinite(y) || !(y > 0.0)) {
    throw DomainError("inverse_upper_gamma: y must be finite and > 0");
  }
  return inverse_scalar_ln(a, std::log(y));
}

void inverse_upper_gamma_sorted(double a, const double* log_y, double* z,
                                std::size_t n) {
  check_order(a);
  if (n == 0) return;
  for (std::size_t i = 1; i < n; ++i) {
    if (!(log_y[i] >= log_y[i - 1])) {
      throw DomainError("inverse_upper_gamma_sorted: targets not ascending");
    }
  }
  z[0] = inverse_scalar_ln(a, log_y[0]);
  double t_prev = std::log(z[0]);
  const double t_floor = std::log(kInverseFloor);
  for (std::size_t i = 1; i < n; ++i) {
    // Larger y means smaller z, so the previous root is an upper bracket.
    double t_hi = t_prev;
    double t_lo = t_floor;
    double t = t_prev;
    double zi = 0.0;
    bool done = false;
    for (int it = 0; it < 60; ++it) {
      const double zz = std::exp(t);
      const GammaEval ge = eval_core(a, zz);
      const double gt = ge.log - log_y[i];
      if (std::abs(gt) <= 1e-12) {
        zi = zz;
        done = true;
        break;
      }
      if (gt >= 0.0) {
        t_lo = std::max(t_lo, t);
      } else {
        t_hi = std::min(t_hi, t);
      }
      const double dg = -std::exp(a * t - zz - ge.log);
      double t_next = t - gt / dg;
      if (!(t_next > t_lo && t_next < t_hi)) t_next = 0.5 * (t_lo + t_hi);
      if (std::abs(t_next - t) < 4e-16 * std::max(1.0, std::abs(t))) {
        t = t_next;
        zi = std::exp(t);
        done = std::abs(eval_core(a, zi).log - log_y[i]) <= 1e-9;
        break;
      }
      t = t_next;
    }
    if (!done) {
      // Fall back to the robust scalar path rather than return a bad root.
      zi = inverse_scalar_ln(a, log_y[i]);
    }
    z[i] = zi;
    t_prev = std::log(zi);
  }
}

std::array<double, 5> log_moments(int nmax, double q, double lambda) {
  if (nmax < 0 || nmax > 4) {
    throw DomainError("log_moment: n must be in [0, 4], got " +
                      std::to_string(nmax));
  }
  if (!std::isfinite(q) || !(q > 0.0) || q > 2.0) {
    throw DomainError("log_moment: q must be in (0, 2]");
  }
  if (!std::isfinite(lambda) || !(lambda > 0.0)) {
    throw DomainError("log_moment: lambda must be > 0");
  }
  const double a = 1.0 - q;
  // M_n = e^{-lambda}/lambda * int_0^inf ln(1+s/lambda)^n (1+s/lambda)^{-q}
  //       e^{-s} ds / (lambda^{q-1} Gamma(1-q, lambda)); the prefactor is
  //       assembled in logs because e^{-lambda} and Gamma(1-q, lambda) both
  //       underflow for large lambda while their ratio stays O(1).
  const double pref_ln =
      -lambda - q * std::log(lambda) - upper_gamma_ln(a, lambda);
  const double pref = std::exp(pref_ln);
  std::array<double, 5> out{};
  for (int n = 0; n <= nmax; ++n) {
    auto f = [&](double s) {
      const double w = std::log1p(s / lambda);
      double p = 1.0;
      for (int k = 0; k < n; ++k) p *= w;
      return p * std::exp(-q * w - s);
    };
    const double integral = quad::integrate_decaying(f, 0.0, 4.0, 5e-13, 4000.0);
    out[n] = pref * integral;
  }
  return out;
}

double log_moment(int n, double q, double lambda) {
  return log_moments(n, q, lambda)[static_cast<std::size_t>(n < 0 ? 0 : n)];
}

std::uint64_t bessel_triangle(int n, int i) {
  if (n < 0 || i < 0 || 2 * i > n || n > 20) {
    throw DomainError("bessel_triangle: need 0 <= 2i <= n <= 20");
  }
  // n!/(i! 2^i (n-2i)!) = C(n, 2i) * (2i-1)!!, kept integral throughout.
  std::uint64_t binom = 1;
  for (int k = 1; k <= 2 * i; ++k) {
    binom = binom * static_cast<std::uint64_t>(n - 2 * i + k) /
            static_cast<std::uint64_t>(k);
  }
  std::uint64_t dfact = 1;
  for (int k = 1; k <= i; ++k) {
    dfact *= static_cast<std::uint64_t>(2 * k - 1);
  }
  return binom * dfact;
}

}  // namespace rankent::specfun
