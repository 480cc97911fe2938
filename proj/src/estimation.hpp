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

#include <limits>
#include <map>
#include <string>
#include <vector>

#include "types.hpp"

namespace rankent::estimation {

enum class FitMethod { rank_ls_q1, rank_ls_q, moments, moments_drift };
const char* method_name(FitMethod m);

// declared_failure is a legitimate terminal state of the consistency
// workflow (no exclusion pattern produced agreeing estimates), distinct
// from a solver that simply failed to converge.
enum class FitOutcome { converged, not_converged, declared_failure };
const char* outcome_name(FitOutcome o);

struct Outsider {
  long long rank = 0;  // 1-based rank in the original sample
  double size = 0.0;
  bool head = true;    // excluded from the large end (false: small end)
};

struct WorkflowOptions {
  // The spread-blind moment member honestly splits from the drift-aware
  // members by up to ~0.2 in q at sigma near 0.5, so the gate sits above
  // that; a genuine outsider pushes the split far past it.
  double agree_q = 0.25;
  double agree_log_lambda = 0.5;
  int head_cap = 3;
  int tail_cap = 5;
};

struct FitReport {
  ModelParams params;
  // Keyed by parameter name: "log_x0", "q", "log_lambda", "sigma",
  // "log_n_total".  Only parameters the method estimates appear.
  std::map<std::string, double> stderrs;
  double correlation = 0.0;
  FitMethod method = FitMethod::rank_ls_q1;
  std::vector<Outsider> outsiders;
  FitOutcome outcome = FitOutcome::not_converged;
  bool converged = false;
  // Per-rank log residuals, observed minus fitted, rank order.
  std::vector<double> residuals;
  double sse = std::numeric_limits<double>::infinity();
  std::string detail;
  WorkflowOptions workflow;  // populated by consistency_workflow
};

// One-parameter fit at q=1, sigma=0: log x0 free (optionally log N too),
// lambda eliminated through the constraint equation at every step.
// n_total = 0 uses the sample total.  Needs >= 10 entries.
FitReport fit_rank_q1(const RankedSample& sample, double n_total = 0.0,
                      bool fit_n = false);

// Full least-squares fit over (q, log lambda, log x0) and, with drift,
// sigma, multistarted over a fixed initial-guess grid.  force_q1 pins q=1,
// sigma=0, reducing to the fit_rank_q1 estimator.  Needs >= 20 entries.
FitReport fit_rank_q(const RankedSample& sample, bool with_drift = false,
                     bool force_q1 = false);

// Logarithmic-moment system: orders 1..3 for (q, lambda, x0); with drift,
// orders 1..4 with the even-order sigma corrections.  Needs >= 20 entries.
FitReport fit_moments(const RankedSample& sample, bool with_drift = false);

// Three-way cross-check (rank LS, moments, drift moments) with iterative
// head/tail exclusion until the estimates agree; returns the drift-moments
// result of the first agreeing state, or a declared failure carrying the
// closest state found.
FitReport consistency_workflow(const RankedSample& sample,
                               const WorkflowOptions& options = {});

// Sample Pearson correlation; throws DomainError on length < 2, unequal
// lengths, or zero variance.
double pearson_r(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace rankent::estimation
