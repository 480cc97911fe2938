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

#include "estimation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>

#include <Eigen/Dense>

#include "errors.hpp"
#include "model.hpp"
#include "optim.hpp"
#include "specfun.hpp"

namespace rankent::estimation {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Parameter box shared by the rank-curve objectives.  q tops out at the
// model's support limit; the rest are generous log-scale bounds.
constexpr double kQLo = 0.05, kQHi = 2.0;
constexpr double kLnLambdaLo = -30.0, kLnLambdaHi = 8.0;
constexpr double kLnX0Lo = 0.0, kLnX0Hi = 60.0;
constexpr double kSigmaLo = 0.0, kSigmaHi = 3.0;

// The multistart grid for both rank least squares and the moment solver.
constexpr double kStartQ[] = {0.8, 1.0, 1.3, 1.6};
constexpr double kStartLnLambda[] = {-12.0, -8.0, -4.0, -1.0};

double pearson_or_zero(const std::vector<double>& a,
                       const std::vector<double>& b) {
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
  return std::max(-1.0, std::min(1.0, sab / std::sqrt(saa * sbb)));
}

std::vector<double> observed_logs(const RankedSample& s) {
  std::vector<double> logs(s.sizes.size());
  for (std::size_t i = 0; i < logs.size(); ++i) logs[i] = std::log(s.sizes[i]);
  return logs;
}

// First guess for log x0: straight line through the small-size fifth of
// the rank plot (log size vs rank), extrapolated to r = n_c.
double tail_log_x0(const RankedSample& s) {
  const std::size_t n = s.n_c();
  const std::size_t k = std::min(n, std::max<std::size_t>(5, n / 5));
  double mr = 0.0, ml = 0.0;
  for (std::size_t i = n - k; i < n; ++i) {
    mr += s.ranks[i];
    ml += std::log(s.sizes[i]);
  }
  mr /= static_cast<double>(k);
  ml /= static_cast<double>(k);
  double srr = 0.0, srl = 0.0;
  for (std::size_t i = n - k; i < n; ++i) {
    srr += (s.ranks[i] - mr) * (s.ranks[i] - mr);
    srl += (s.ranks[i] - mr) * (std::log(s.sizes[i]) - ml);
  }
  double guess = ml;
  if (srr > 0.0) {
    guess = ml + (srl / srr) * (static_cast<double>(n) - mr);
  }
  return std::min(std::max(guess, kLnX0Lo), kLnX0Hi);
}

// Model log sizes at the sample's ranks; drift goes through the
// interpolated drift curve, sigma = 0 through the closed form.
std::vector<double> predicted_logs(const ModelParams& p,
                                   const std::vector<double>& ranks) {
  std::vector<double> out(ranks.size());
  if (p.sigma == 0.0) {
    model::rank_curve(p, ranks.data(), out.data(), ranks.size());
    for (double& v : out) v = std::log(v);
  } else {
    const model::DriftRankCurve curve(p, p.n_c, /*fast=*/true);
    for (std::size_t i = 0; i < ranks.size(); ++i) {
      out[i] = std::log(curve.at_rank(ranks[i]));
    }
  }
  return out;
}

double sse_of(const std::vector<double>& obs, const std::vector<double>& pred) {
  double sse = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const double r = obs[i] - pred[i];
    sse += r * r;
  }
  return sse;
}

ModelParams params_from(double q, double ln_lambda, double ln_x0, double sigma,
                        long long n_c) {
  ModelParams p;
  p.q = q;
  p.lambda = std::exp(ln_lambda);
  p.x0 = std::exp(ln_x0);
  p.sigma = sigma;
  p.n_c = n_c;
  return p;
}

// Least-squares covariance from a numeric Jacobian of the predicted log
// sizes.  free_names/h give the perturbation per free parameter; theta is
// mutated around the optimum and restored by value semantics.
void fill_rank_stderrs(FitReport& rep, const std::vector<double>& ranks,
                       const std::vector<std::string>& names,
                       const std::vector<double>& theta,
                       const std::vector<double>& h,
                       const std::function<ModelParams(
                           const std::vector<double>&)>& to_params) {
  const std::size_t n = ranks.size();
  const std::size_t p = theta.size();
  Eigen::MatrixXd J(n, p);
  try {
    for (std::size_t j = 0; j < p; ++j) {
      std::vector<double> tp = theta, tm = theta;
      tp[j] += h[j];
      tm[j] -= h[j];
      const std::vector<double> fp = predicted_logs(to_params(tp), ranks);
      const std::vector<double> fm = predicted_logs(to_params(tm), ranks);
      for (std::size_t i = 0; i < n; ++i) {
        J(i, j) = (fp[i] - fm[i]) / (2.0 * h[j]);
      }
    }
  } catch (const Error&) {
    rep.detail += "; stderr computation failed at the optimum";
    return;
  }
  const double dof = static_cast<double>(n > p ? n - p : 1);
  const double sigma2 = rep.sse / dof;
  const Eigen::MatrixXd jtj = J.transpose() * J;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(jtj);
  if (!lu.isInvertible()) {
    rep.detail += "; normal matrix singular, no stderr";
    return;
  }
  const Eigen::MatrixXd cov = sigma2 * lu.inverse();
  for (std::size_t j = 0; j < p; ++j) {
    rep.stderrs[names[j]] = std::sqrt(std::max(0.0, cov(j, j)));
  }
}

// ---------------------------------------------------------------------
// Logarithmic-moment machinery.

double binom(int n, int m) {
  double c = 1.0;
  for (int i = 0; i < m; ++i) c = c * (n - i) / (i + 1);
  return c;
}

// LHS_n(w) = sum_m (-1)^m C(n,m) L_{n-m} w^m = mean of (log x - w)^n.
double lhs_poly(const double* L, int n, double w) {
  double acc = 0.0;
  double wy = 1.0;
  for (int m = 0; m <= n; ++m) {
    acc += (m % 2 == 0 ? 1.0 : -1.0) * binom(n, m) * L[n - m] * wy;
    wy *= w;
  }
  return acc;
}

// Model side of equation n: M_n plus the even-order drift corrections
// T(n,i) sigma^{2i} M_{n-2i}.
double model_rhs(const std::array<double, 5>& M, int n, double v) {
  double acc = M[static_cast<std::size_t>(n)];
  if (v != 0.0) {
    double vp = 1.0;
    for (int i = 1; 2 * i <= n; ++i) {
      vp *= v;
      acc += static_cast<double>(specfun::bessel_triangle(n, i)) * vp *
             M[static_cast<std::size_t>(n - 2 * i)];
    }
  }
  return acc;
}

struct InnerEval {
  double w = 0.0;
  double v = 0.0;      // sigma^2, unconstrained during solving
  double f1 = kInf;    // residuals of the two non-eliminated equations
  double f2 = kInf;
  double scale = 1.0;  // magnitude of the equations, for stopping rules
};

// Eliminates w through equation 1 (and sigma^2 through equation 2 when
// drift is on), leaving a 2x2 system in (q, ln lambda).
InnerEval inner_eval(const double* L, bool drift, double q, double ln_lambda) {
  InnerEval ev;
  const auto M = specfun::log_moments(drift ? 4 : 3, q, std::exp(ln_lambda));
  ev.w = L[1] - M[1];
  if (!drift) {
    ev.f1 = lhs_poly(L, 2, ev.w) - model_rhs(M, 2, 0.0);
    ev.f2 = lhs_poly(L, 3, ev.w) - model_rhs(M, 3, 0.0);
    ev.scale = std::max({1.0, std::fabs(lhs_poly(L, 2, ev.w)),
                         std::fabs(lhs_poly(L, 3, ev.w))});
  } else {
    ev.v = lhs_poly(L, 2, ev.w) - M[2];
    ev.f1 = lhs_poly(L, 3, ev.w) - model_rhs(M, 3, ev.v);
    ev.f2 = lhs_poly(L, 4, ev.w) - model_rhs(M, 4, ev.v);
    ev.scale = std::max({1.0, std::fabs(lhs_poly(L, 3, ev.w)),
                         std::fabs(lhs_poly(L, 4, ev.w))});
  }
  return ev;
}

struct MomentRoot {
  double q = 1.0;
  double ln_lambda = 0.0;
  double w = 0.0;
  double v = 0.0;
  double resid = kInf;  // max-norm of the full residual vector
  bool ok = false;
};

constexpr double kMomentQLo = 0.03;

MomentRoot newton_from(const double* L, bool drift, double q0,
                       double ln_lambda0) {
  MomentRoot root;
  double q = q0, ll = ln_lambda0;
  InnerEval cur;
  try {
    cur = inner_eval(L, drift, q, ll);
  } catch (const Error&) {
    return root;
  }
  for (int iter = 0; iter < 60; ++iter) {
    const double fnorm = std::max(std::fabs(cur.f1), std::fabs(cur.f2));
    if (!std::isfinite(fnorm)) return root;
    if (fnorm <= 1e-12 * cur.scale) break;
    // Two-sided numeric Jacobian, bounds-aware.
    const double hq = 1e-6, hl = 1e-6;
    const double qp = std::min(q + hq, kQHi), qm = std::max(q - hq, kMomentQLo);
    const double lp = std::min(ll + hl, kLnLambdaHi),
                 lm = std::max(ll - hl, kLnLambdaLo);
    InnerEval eqp, eqm, elp, elm;
    try {
      eqp = inner_eval(L, drift, qp, ll);
      eqm = inner_eval(L, drift, qm, ll);
      elp = inner_eval(L, drift, q, lp);
      elm = inner_eval(L, drift, q, lm);
    } catch (const Error&) {
      return root;
    }
    const double j11 = (eqp.f1 - eqm.f1) / (qp - qm);
    const double j21 = (eqp.f2 - eqm.f2) / (qp - qm);
    const double j12 = (elp.f1 - elm.f1) / (lp - lm);
    const double j22 = (elp.f2 - elm.f2) / (lp - lm);
    const double det = j11 * j22 - j12 * j21;
    if (!std::isfinite(det) || det == 0.0) return root;
    double dq = -(j22 * cur.f1 - j12 * cur.f2) / det;
    double dl = -(j11 * cur.f2 - j21 * cur.f1) / det;
    // Trust region keeps the step inside the smooth neighborhood.
    const double cap = std::max(std::fabs(dq) / 0.4, std::fabs(dl) / 2.5);
    if (cap > 1.0) {
      dq /= cap;
      dl /= cap;
    }
    bool accepted = false;
    double damp = 1.0;
    for (int k = 0; k < 9; ++k) {
      const double qn =
          std::min(std::max(q + damp * dq, kMomentQLo), kQHi);
      const double ln =
          std::min(std::max(ll + damp * dl, kLnLambdaLo), kLnLambdaHi);
      InnerEval trial;
      try {
        trial = inner_eval(L, drift, qn, ln);
      } catch (const Error&) {
        damp *= 0.5;
        continue;
      }
      const double tn = std::max(std::fabs(trial.f1), std::fabs(trial.f2));
      if (tn < fnorm) {
        q = qn;
        ll = ln;
        cur = trial;
        accepted = true;
        break;
      }
      damp *= 0.5;
    }
    if (!accepted) break;
  }
  root.q = q;
  root.ln_lambda = ll;
  root.w = cur.w;
  root.v = drift ? cur.v : 0.0;
  root.resid = std::max(std::fabs(cur.f1), std::fabs(cur.f2));
  root.ok = std::isfinite(root.resid) && root.resid <= 1e-8 &&
            std::isfinite(root.w) && root.w >= 0.0;
  return root;
}

// Full residual vector of the moment system at theta = (w, q, lnl[, v]),
// used for the delta-method covariance.
Eigen::VectorXd full_residuals(const double* L, bool drift,
                               const Eigen::VectorXd& theta) {
  const int P = drift ? 4 : 3;
  const auto M =
      specfun::log_moments(P, theta(1), std::exp(theta(2)));
  const double v = drift ? theta(3) : 0.0;
  Eigen::VectorXd F(P);
  for (int n = 1; n <= P; ++n) {
    F(n - 1) = lhs_poly(L, n, theta(0)) - model_rhs(M, n, v);
  }
  return F;
}

void fill_moment_stderrs(FitReport& rep, const double* L, bool drift,
                         double w, double q, double ln_lambda, double v,
                         std::size_t n_c) {
  const int P = drift ? 4 : 3;
  Eigen::VectorXd theta(P);
  theta(0) = w;
  theta(1) = q;
  theta(2) = ln_lambda;
  if (drift) theta(3) = v;
  Eigen::MatrixXd A(P, P);
  try {
    for (int j = 0; j < P; ++j) {
      const double h = 1e-6 * std::max(1.0, std::fabs(theta(j)));
      Eigen::VectorXd tp = theta, tm = theta;
      tp(j) = std::min(tp(j) + h, j == 1 ? kQHi : tp(j) + h);
      tm(j) = std::max(tm(j) - h, j == 1 ? kMomentQLo : tm(j) - h);
      A.col(j) = (full_residuals(L, drift, tp) - full_residuals(L, drift, tm)) /
                 (tp(j) - tm(j));
    }
  } catch (const Error&) {
    rep.detail += "; stderr computation failed at the root";
    return;
  }
  // dF/dL_k is analytic: the only L_k terms are in the LHS polynomials.
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(P, P);
  for (int i = 1; i <= P; ++i) {
    double wy = 1.0;
    for (int k = i; k >= 1; --k) {
      B(i - 1, k - 1) = ((i - k) % 2 == 0 ? 1.0 : -1.0) * binom(i, k) * wy;
      wy *= w;
    }
  }
  Eigen::MatrixXd S(P, P);
  for (int j = 1; j <= P; ++j) {
    for (int k = 1; k <= P; ++k) {
      S(j - 1, k - 1) = (L[j + k] - L[j] * L[k]) / static_cast<double>(n_c);
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (!lu.isInvertible()) {
    rep.detail += "; moment Jacobian singular, no stderr";
    return;
  }
  const Eigen::MatrixXd Ai = lu.inverse();
  const Eigen::MatrixXd cov = Ai * B * S * B.transpose() * Ai.transpose();
  rep.stderrs["log_x0"] = std::sqrt(std::max(0.0, cov(0, 0)));
  rep.stderrs["q"] = std::sqrt(std::max(0.0, cov(1, 1)));
  rep.stderrs["log_lambda"] = std::sqrt(std::max(0.0, cov(2, 2)));
  if (drift) {
    const double se_v = std::sqrt(std::max(0.0, cov(3, 3)));
    const double sigma = std::sqrt(std::max(0.0, v));
    // Near sigma = 0 the square root is not differentiable; the spread of
    // sigma is then the square root of the spread of sigma^2.
    rep.stderrs["sigma"] =
        sigma > 1e-6 ? se_v / (2.0 * sigma) : std::sqrt(se_v);
  }
}

void attach_curve_diagnostics(FitReport& rep, const RankedSample& sample,
                              const std::vector<double>& logs) {
  try {
    const std::vector<double> pred = predicted_logs(rep.params, sample.ranks);
    rep.residuals.resize(logs.size());
    for (std::size_t i = 0; i < logs.size(); ++i) {
      rep.residuals[i] = logs[i] - pred[i];
    }
    rep.sse = sse_of(logs, pred);
    rep.correlation = pearson_or_zero(logs, pred);
  } catch (const Error& e) {
    rep.detail += std::string("; curve diagnostics unavailable (") + e.what() +
                  ")";
  }
}

}  // namespace

const char* method_name(FitMethod m) {
  switch (m) {
    case FitMethod::rank_ls_q1: return "rank_ls_q1";
    case FitMethod::rank_ls_q: return "rank_ls_q";
    case FitMethod::moments: return "moments";
    case FitMethod::moments_drift: return "moments_drift";
  }
  return "unknown";
}

const char* outcome_name(FitOutcome o) {
  switch (o) {
    case FitOutcome::converged: return "converged";
    case FitOutcome::not_converged: return "not_converged";
    case FitOutcome::declared_failure: return "declared_failure";
  }
  return "unknown";
}

double pearson_r(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) {
    throw DomainError("pearson_r: length mismatch");
  }
  if (xs.size() < 2) throw DomainError("pearson_r: needs >= 2 pairs");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(xs.size());
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) {
    throw DomainError("pearson_r: zero variance in an input");
  }
  return std::max(-1.0, std::min(1.0, sxy / std::sqrt(sxx * syy)));
}

FitReport fit_rank_q1(const RankedSample& sample, double n_total, bool fit_n) {
  const std::size_t n = sample.n_c();
  if (n < 10) {
    throw DomainError("fit_rank_q1: needs >= 10 entries, got " +
                      std::to_string(n));
  }
  const double sum =
      std::accumulate(sample.sizes.begin(), sample.sizes.end(), 0.0);
  const double N0 = n_total > 0.0 ? n_total : sum;
  const double nc = static_cast<double>(n);
  if (!(N0 > nc)) {
    throw InfeasibleError(
        "fit_rank_q1: total size must exceed the unit count (every unit has "
        "size >= 1)");
  }
  const std::vector<double> logs = observed_logs(sample);
  const auto n_c_ll = static_cast<long long>(n);

  auto make_params = [&](double ln_x0, double ln_n) {
    const double x0 = std::exp(ln_x0);
    ModelParams p;
    p.q = 1.0;
    p.x0 = x0;
    p.sigma = 0.0;
    p.n_c = n_c_ll;
    p.n_total = std::exp(ln_n);
    p.lambda = model::solve_lambda(p.n_total, n_c_ll, x0, 1.0, 0.0);
    return p;
  };
  auto sse_at = [&](double ln_x0, double ln_n) {
    if (ln_x0 < kLnX0Lo || ln_x0 > kLnX0Hi) return kInf;
    try {
      return sse_of(logs, predicted_logs(make_params(ln_x0, ln_n), sample.ranks));
    } catch (const Error&) {
      return kInf;
    }
  };

  FitReport rep;
  rep.method = FitMethod::rank_ls_q1;
  double ln_x0_hat = 0.0;
  double ln_n_hat = std::log(N0);
  bool have_opt = false;
  if (!fit_n) {
    // One free parameter; feasibility bounds it away from N/n_c.
    const double hi = std::log(N0 / nc) - 1e-9;
    if (hi <= kLnX0Lo) {
      throw InfeasibleError("fit_rank_q1: N/n_c <= 1 leaves no room for x0");
    }
    const int grid = 48;
    double best_v = kInf, best_t = 0.0;
    for (int i = 0; i <= grid; ++i) {
      const double t = kLnX0Lo + (hi - kLnX0Lo) * i / grid;
      const double v = sse_at(t, ln_n_hat);
      if (v < best_v) {
        best_v = v;
        best_t = t;
      }
    }
    if (std::isfinite(best_v)) {
      const double cell = (hi - kLnX0Lo) / grid;
      ln_x0_hat = optim::golden_min(
          [&](double t) { return sse_at(t, ln_n_hat); },
          std::max(kLnX0Lo, best_t - cell), std::min(hi, best_t + cell), 1e-11);
      rep.sse = sse_at(ln_x0_hat, ln_n_hat);
      have_opt = std::isfinite(rep.sse);
    }
  } else {
    const double guess =
        std::min(tail_log_x0(sample), std::log(N0 / nc) - 0.5);
    auto obj = [&](const std::vector<double>& th) {
      if (th[1] < std::log(nc) || th[1] > 60.0) return kInf;
      return sse_at(th[0], th[1]);
    };
    const optim::MinResult res = optim::nelder_mead(
        obj, {std::max(kLnX0Lo, guess), std::log(N0)}, {0.3, 0.15}, 1e-13,
        1e-10, 3000);
    ln_x0_hat = res.x[0];
    ln_n_hat = res.x[1];
    rep.sse = res.f;
    have_opt = std::isfinite(res.f) && res.converged;
  }
  if (!have_opt) {
    rep.outcome = FitOutcome::not_converged;
    rep.detail = "no feasible optimum found";
    return rep;
  }
  rep.params = make_params(ln_x0_hat, ln_n_hat);
  rep.outcome = FitOutcome::converged;
  rep.converged = true;
  attach_curve_diagnostics(rep, sample, logs);
  {
    std::vector<std::string> names = {"log_x0"};
    std::vector<double> theta = {ln_x0_hat};
    std::vector<double> h = {1e-5};
    if (fit_n) {
      names.push_back("log_n_total");
      theta.push_back(ln_n_hat);
      h.push_back(1e-5);
    }
    fill_rank_stderrs(rep, sample.ranks, names, theta, h,
                      [&](const std::vector<double>& th) {
                        return make_params(th[0],
                                           fit_n ? th[1] : ln_n_hat);
                      });
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "lambda solved from the constraint at N=%.6g",
                rep.params.n_total);
  rep.detail = buf;
  return rep;
}

FitReport fit_rank_q(const RankedSample& sample, bool with_drift,
                     bool force_q1) {
  const std::size_t n = sample.n_c();
  if (n < 20) {
    throw DomainError("fit_rank_q: needs >= 20 entries, got " +
                      std::to_string(n));
  }
  if (force_q1) {
    if (with_drift) {
      throw DomainError("fit_rank_q: force_q1 applies to the sigma = 0 fit");
    }
    // Pinning q=1, sigma=0 leaves the same one-parameter problem the
    // dedicated estimator solves; delegate so they agree exactly.
    return fit_rank_q1(sample, 0.0, false);
  }
  const std::vector<double> logs = observed_logs(sample);
  const auto n_c_ll = static_cast<long long>(n);
  const double ln_x0_guess = tail_log_x0(sample);

  auto obj = [&](const std::vector<double>& th) {
    const double q = th[0], ll = th[1], lx = th[2];
    const double sigma = with_drift ? th[3] : 0.0;
    if (q < kQLo || q > kQHi || ll < kLnLambdaLo || ll > kLnLambdaHi ||
        lx < kLnX0Lo || lx > kLnX0Hi || sigma < kSigmaLo || sigma > kSigmaHi) {
      return kInf;
    }
    try {
      return sse_of(logs,
                    predicted_logs(params_from(q, ll, lx, sigma, n_c_ll),
                                   sample.ranks));
    } catch (const Error&) {
      return kInf;
    }
  };

  optim::MinResult best;
  int best_start = -1, start = 0, converged_starts = 0;
  for (double q0 : kStartQ) {
    for (double ll0 : kStartLnLambda) {
      std::vector<double> x0 = {q0, ll0, ln_x0_guess};
      std::vector<double> step = {0.15, 1.5, 0.4};
      if (with_drift) {
        x0.push_back(0.15);
        step.push_back(0.1);
      }
      const optim::MinResult res =
          optim::nelder_mead(obj, x0, step, 1e-10, 1e-8, 120);
      if (std::isfinite(res.f)) ++converged_starts;
      if (res.f < best.f) {
        best = res;
        best_start = start;
      }
      ++start;
    }
  }
  FitReport rep;
  rep.method = FitMethod::rank_ls_q;
  if (!std::isfinite(best.f)) {
    rep.outcome = FitOutcome::not_converged;
    rep.detail = "all multistart fits failed";
    return rep;
  }
  {
    std::vector<double> step = {0.02, 0.1, 0.04};
    if (with_drift) step.push_back(0.02);
    // The drift objective rides on an interpolation table with a noise
    // floor around 1e-6 of the sse; demanding more there just spins.
    const double ftol = with_drift ? 2e-6 : 1e-13;
    const double xtol = with_drift ? 2e-5 : 1e-10;
    const optim::MinResult pol =
        optim::nelder_mead(obj, best.x, step, ftol, xtol, with_drift ? 800 : 2500);
    if (pol.f <= best.f) best = pol;
  }
  const double sigma_hat = with_drift ? best.x[3] : 0.0;
  rep.params = params_from(best.x[0], best.x[1], best.x[2], sigma_hat, n_c_ll);
  rep.sse = best.f;
  rep.outcome =
      best.converged ? FitOutcome::converged : FitOutcome::not_converged;
  rep.converged = best.converged;
  attach_curve_diagnostics(rep, sample, logs);
  {
    std::vector<std::string> names = {"q", "log_lambda", "log_x0"};
    std::vector<double> theta = {best.x[0], best.x[1], best.x[2]};
    // Drift predictions go through an interpolation table; wider stencils
    // keep the finite differences above its noise floor.
    const double hs = with_drift ? 2e-3 : 1e-4;
    std::vector<double> h = {hs, 10.0 * hs, hs};
    if (with_drift) {
      names.push_back("sigma");
      theta.push_back(std::max(sigma_hat, 2e-3));
      h.push_back(2e-3);
    }
    fill_rank_stderrs(rep, sample.ranks, names, theta, h,
                      [&](const std::vector<double>& th) {
                        return params_from(th[0], th[1], th[2],
                                           with_drift ? th[3] : 0.0, n_c_ll);
                      });
  }
  char buf[128];
  std::snprintf(buf, sizeof buf,
                "%d/16 starts usable; best from (q=%.2g, log_lambda=%.2g)",
                converged_starts, kStartQ[best_start / 4],
                kStartLnLambda[best_start % 4]);
  rep.detail = buf;
  return rep;
}

FitReport fit_moments(const RankedSample& sample, bool with_drift) {
  const std::size_t n = sample.n_c();
  if (n < 20) {
    throw DomainError("fit_moments: needs >= 20 entries, got " +
                      std::to_string(n));
  }
  const std::vector<double> logs = observed_logs(sample);
  // Raw log moments up to order 8 (orders 5..8 feed the covariance).
  double L[9] = {1.0};
  for (double lx : logs) {
    double p = 1.0;
    for (int k = 1; k <= 8; ++k) {
      p *= lx;
      L[k] += p;
    }
  }
  for (int k = 1; k <= 8; ++k) L[k] /= static_cast<double>(n);

  MomentRoot best;
  for (double q0 : kStartQ) {
    for (double ll0 : kStartLnLambda) {
      const MomentRoot root = newton_from(L, with_drift, q0, ll0);
      if (root.ok && root.resid < best.resid) best = root;
    }
  }
  FitReport rep;
  rep.method = with_drift ? FitMethod::moments_drift : FitMethod::moments;
  if (!best.ok) {
    rep.outcome = FitOutcome::not_converged;
    rep.detail = "no start reached a root of the moment system";
    return rep;
  }
  bool on_boundary = false;
  double v_unconstrained = best.v;
  if (with_drift && best.v < 0.0) {
    // The four-moment root left the parameter space (sigma^2 < 0).  The
    // constrained optimum sits on the sigma = 0 boundary, where the spread
    // equation drops out and the system reduces to the three-moment one;
    // keeping the infeasible root's q and lambda would smuggle the negative
    // variance into them.
    MomentRoot flat;
    for (double q0 : kStartQ) {
      for (double ll0 : kStartLnLambda) {
        const MomentRoot root = newton_from(L, false, q0, ll0);
        if (root.ok && root.resid < flat.resid) flat = root;
      }
    }
    if (flat.ok) {
      best = flat;
      best.v = 0.0;
      on_boundary = true;
    }
  }
  const double sigma = std::sqrt(std::max(best.v, 0.0));
  rep.params =
      params_from(best.q, best.ln_lambda, best.w, sigma,
                  static_cast<long long>(n));
  rep.outcome = FitOutcome::converged;
  rep.converged = true;
  char buf[128];
  std::snprintf(buf, sizeof buf, "moment residual %.2e", best.resid);
  rep.detail = buf;
  if (on_boundary) {
    std::snprintf(buf, sizeof buf,
                  "; sigma^2 root was %.3g, refit on the sigma = 0 boundary",
                  v_unconstrained);
    rep.detail += buf;
  } else if (with_drift && best.v < 0.0) {
    std::snprintf(buf, sizeof buf,
                  "; sigma^2 solved to %.3g, reported sigma = 0", best.v);
    rep.detail += buf;
  }
  attach_curve_diagnostics(rep, sample, logs);
  fill_moment_stderrs(rep, L, with_drift && !on_boundary, best.w, best.q,
                      best.ln_lambda, best.v, n);
  return rep;
}

FitReport consistency_workflow(const RankedSample& sample,
                               const WorkflowOptions& options) {
  const std::size_t n = sample.n_c();
  if (n < 20) {
    throw DomainError("consistency_workflow: needs >= 20 entries, got " +
                      std::to_string(n));
  }
  if (options.head_cap < 0 || options.tail_cap < 0 ||
      !(options.agree_q > 0.0) || !(options.agree_log_lambda > 0.0)) {
    throw DomainError("consistency_workflow: invalid options");
  }

  auto outsiders_of = [&](int h, int t) {
    std::vector<Outsider> out;
    for (int i = 0; i < h; ++i) {
      out.push_back({i + 1, sample.sizes[static_cast<std::size_t>(i)], true});
    }
    for (int j = t - 1; j >= 0; --j) {
      const std::size_t idx = n - 1 - static_cast<std::size_t>(j);
      out.push_back({static_cast<long long>(idx) + 1, sample.sizes[idx], false});
    }
    return out;
  };

  struct StateResult {
    double score = kInf;
    FitReport drift_report;
    int h = 0, t = 0;
    bool valid = false;
  };
  StateResult best;

  const int cap_total = options.head_cap + options.tail_cap;
  for (int total = 0; total <= cap_total; ++total) {
    // Largest entries go first within a given exclusion budget.
    for (int h = std::min(total, options.head_cap); h >= 0; --h) {
      const int t = total - h;
      if (t > options.tail_cap) continue;
      if (n - static_cast<std::size_t>(total) < 20) continue;
      std::vector<double> kept(sample.sizes.begin() + h,
                               sample.sizes.end() - t);
      const RankedSample sub = make_ranked_sample(std::move(kept), sample.label);
      FitReport mom, momd;
      try {
        mom = fit_moments(sub, false);
        momd = fit_moments(sub, true);
      } catch (const Error&) {
        continue;
      }
      if (!mom.converged || !momd.converged) continue;
      double dq = std::fabs(mom.params.q - momd.params.q);
      double dll = std::fabs(std::log(mom.params.lambda) -
                             std::log(momd.params.lambda));
      // The spread-aware rank fit costs two orders of magnitude more than
      // a moment solve, and no third estimate can restore agreement once
      // the moment pair is past the gates; such patterns are scored on the
      // pair alone.
      if (dq <= options.agree_q && dll <= options.agree_log_lambda) {
        FitReport rank;
        try {
          rank = fit_rank_q(sub, true, false);
        } catch (const Error&) {
          continue;
        }
        if (!rank.converged) continue;
        for (const FitReport* other : {&mom, &momd}) {
          dq = std::max(dq, std::fabs(rank.params.q - other->params.q));
          dll = std::max(dll, std::fabs(std::log(rank.params.lambda) -
                                        std::log(other->params.lambda)));
        }
      }
      const double score =
          std::max(dq / options.agree_q, dll / options.agree_log_lambda);
      if (score < best.score) {
        best = {score, momd, h, t, true};
      }
      if (dq <= options.agree_q && dll <= options.agree_log_lambda) {
        FitReport rep = momd;
        rep.outsiders = outsiders_of(h, t);
        rep.workflow = options;
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "agreement at %d head / %d tail exclusions "
                      "(max dq=%.3f, max dlogL=%.3f); %s",
                      h, t, dq, dll, rep.detail.c_str());
        rep.detail = buf;
        return rep;
      }
    }
  }

  // No exclusion pattern reconciled the three estimates.
  FitReport rep;
  if (best.valid) {
    rep = best.drift_report;
    rep.outsiders = outsiders_of(best.h, best.t);
  } else {
    rep.method = FitMethod::moments_drift;
  }
  rep.workflow = options;
  rep.outcome = FitOutcome::declared_failure;
  rep.converged = false;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "no agreement within caps (head<=%d, tail<=%d); closest "
                "state %d/%d with score %.2f",
                options.head_cap, options.tail_cap, best.h, best.t,
                best.valid ? best.score : -1.0);
  rep.detail = buf;
  return rep;
}

}  // namespace rankent::estimation
