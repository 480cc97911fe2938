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

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "dynamics.hpp"
#include "estimation.hpp"
#include "panel.hpp"
#include "report.hpp"
#include "sampling.hpp"

namespace rankent::workflows {

enum class FitMode { q1, q, moments, consistency };
FitMode fit_mode_from(const std::string& name);  // DomainError on unknown
const char* fit_mode_name(FitMode m);

struct FitOptions {
  FitMode mode = FitMode::q1;
  double n_total = 0.0;   // q1 mode: external aggregate, 0 = sample sum
  bool fit_n = false;     // q1 mode: estimate the aggregate too
  bool with_drift = false;
  int exclude_head = 3;   // consistency-mode caps
  int exclude_tail = 5;
  double agree_q = estimation::WorkflowOptions{}.agree_q;
  double agree_log_lambda = estimation::WorkflowOptions{}.agree_log_lambda;
  bool with_band = true;
  double band_level = 0.90;
  long long replicas = 10000;
  std::uint64_t seed = 1;
};

struct FitRun {
  estimation::FitReport report;
  report::Table plot;  // rank, observed, fitted, band_low, band_high
  nlohmann::json document;
  long long year = 0;  // resolved (0 on input = latest available)
};

// Slices (group, year), dispatches on mode, assembles plot data and the
// report document.  year = 0 resolves to the group's latest year.
FitRun run_fit(const Dataset& ds, const std::string& group, long long year,
               const FitOptions& options);

struct ScaleGroup {
  std::string group;
  long long year = 0;
  estimation::FitReport fit;  // the q=1 fit behind the scaling
  report::Table curve;        // rank, size, scaled_rank, scaled_size
};

struct ScaleRun {
  std::vector<ScaleGroup> groups;
  report::Table master;  // scaled_rank, scaled_size on the analytic curve
  nlohmann::json document;
};

// Per-group q=1 fit, then the scale change x' = x*lambda/x0,
// r' = r*Gamma(0,lambda)/n_c; every group lands on x' = invGamma(0, r').
// Empty `groups` means all groups in the dataset.
ScaleRun run_scale(const Dataset& ds, const std::vector<std::string>& groups,
                   long long year, const FitOptions& fit_options);

struct BandRun {
  estimation::FitReport report;
  sampling::ConfidenceBand band;
  report::Table table;  // rank, observed, band_low, band_high
  nlohmann::json document;
  long long year = 0;
};

BandRun run_band(const Dataset& ds, const std::string& group, long long year,
                 const FitOptions& options);

struct DynamicsOptions {
  double delta_u = 0.25;
  double min_bin_frac = 0.15;
  bool weighted = false;
};

struct DynamicsRun {
  dynamics::DynamicsFit fit;
  dynamics::BinnedDynamics bins;
  report::Table bin_table;  // bin_center, mean_udot, std_udot, count
  nlohmann::json document;
};

// Whole-panel pipeline for one group: growth points, binning, q fit.
DynamicsRun run_dynamics(const Dataset& ds, const std::string& group,
                         const DynamicsOptions& options);

struct CompareQRow {
  std::string group;
  long long year = 0;  // cross-section year used for the maxent fit
  long long n_c = 0;
  double q_maxent = 0.0;
  double q_maxent_std = 0.0;
  estimation::FitOutcome maxent_outcome = estimation::FitOutcome::not_converged;
  double q_dynamics = 0.0;
  double q_dynamics_std = 0.0;
  bool well_defined = false;
};

struct CompareQOptions {
  long long year = 0;  // 0 = latest per group
  DynamicsOptions dynamics;
  estimation::WorkflowOptions workflow;
};

struct CompareQRun {
  std::vector<CompareQRow> rows;  // sorted by group name
  // Through-origin regression of q_dynamics on q_maxent over rows whose
  // dynamics fit is well defined and whose maxent workflow agreed.
  double slope = 0.0;
  double r = 0.0;
  long long groups_used = 0;
  long long groups_flagged = 0;
  report::Table table;
  nlohmann::json document;
};

CompareQRun run_compare_q(const Dataset& ds, const CompareQOptions& options);

}  // namespace rankent::workflows
