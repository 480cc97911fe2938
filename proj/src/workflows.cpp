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

#include "workflows.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "errors.hpp"
#include "model.hpp"
#include "specfun.hpp"

namespace rankent::workflows {

using nlohmann::json;
using report::num;
using report::Table;

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string checksum_hex(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

long long resolve_year(const Dataset& ds, const std::string& group,
                       long long year) {
  if (year != 0) return year;
  const auto years = years_for(ds, group);
  if (years.empty()) {
    throw DomainError("no records for group '" + group + "'");
  }
  return years.back();
}

json source_json(const Dataset& ds) {
  json out;
  out["source"] = ds.source_path;
  out["checksum"] = checksum_hex(ds.checksum);
  return out;
}

std::vector<double> fitted_sizes(const ModelParams& p,
                                 const std::vector<double>& ranks) {
  std::vector<double> out(ranks.size());
  if (p.sigma == 0.0) {
    model::rank_curve(p, ranks.data(), out.data(), ranks.size());
  } else {
    const model::DriftRankCurve curve(p, p.n_c, /*fast=*/true);
    for (std::size_t i = 0; i < ranks.size(); ++i) {
      out[i] = curve.at_rank(ranks[i]);
    }
  }
  return out;
}

json fit_config(const Dataset& ds, const std::string& group, long long year,
                const FitOptions& o, const char* command) {
  json cfg = source_json(ds);
  cfg["command"] = command;
  cfg["mode"] = fit_mode_name(o.mode);
  cfg["group"] = group;
  cfg["year"] = year;
  cfg["n_total"] = o.n_total;
  cfg["fit_n"] = o.fit_n;
  cfg["with_drift"] = o.with_drift;
  cfg["exclude_head"] = o.exclude_head;
  cfg["exclude_tail"] = o.exclude_tail;
  cfg["agree_q"] = o.agree_q;
  cfg["agree_log_lambda"] = o.agree_log_lambda;
  cfg["with_band"] = o.with_band;
  cfg["band_level"] = o.band_level;
  cfg["replicas"] = o.replicas;
  cfg["seed"] = o.seed;
  return cfg;
}

estimation::FitReport dispatch_fit(const RankedSample& sample,
                                   const FitOptions& o) {
  switch (o.mode) {
    case FitMode::q1:
      return estimation::fit_rank_q1(sample, o.n_total, o.fit_n);
    case FitMode::q:
      return estimation::fit_rank_q(sample, o.with_drift, false);
    case FitMode::moments:
      return estimation::fit_moments(sample, o.with_drift);
    case FitMode::consistency: {
      estimation::WorkflowOptions w;
      w.agree_q = o.agree_q;
      w.agree_log_lambda = o.agree_log_lambda;
      w.head_cap = o.exclude_head;
      w.tail_cap = o.exclude_tail;
      return estimation::consistency_workflow(sample, w);
    }
  }
  throw DomainError("unknown fit mode");
}

}  // namespace

FitMode fit_mode_from(const std::string& name) {
  if (name == "q1") return FitMode::q1;
  if (name == "q") return FitMode::q;
  if (name == "moments") return FitMode::moments;
  if (name == "consistency") return FitMode::consistency;
  throw DomainError("unknown fit mode '" + name +
                    "' (expected q1, q, moments, or consistency)");
}

const char* fit_mode_name(FitMode m) {
  switch (m) {
    case FitMode::q1: return "q1";
    case FitMode::q: return "q";
    case FitMode::moments: return "moments";
    case FitMode::consistency: return "consistency";
  }
  return "unknown";
}

FitRun run_fit(const Dataset& ds, const std::string& group, long long year,
               const FitOptions& options) {
  if (!(options.band_level > 0.0) || !(options.band_level < 1.0)) {
    throw DomainError("band level must be inside (0, 1)");
  }
  FitRun run;
  run.year = resolve_year(ds, group, year);
  const RankedSample sample = slice_ranked(ds, group, run.year);
  run.report = dispatch_fit(sample, options);

  const std::size_t n = sample.n_c();
  std::vector<double> fitted(n, kNan);
  std::vector<double> lo(n, kNan), hi(n, kNan);
  // A failed fit still gets its observed column; fitted and band columns
  // stay blank when the parameters are unusable.
  if (run.report.outcome != estimation::FitOutcome::not_converged) {
    try {
      fitted = fitted_sizes(run.report.params, sample.ranks);
    } catch (const Error&) {
      std::fill(fitted.begin(), fitted.end(), kNan);
    }
    if (options.with_band) {
      try {
        const sampling::ConfidenceBand band = sampling::confidence_band(
            run.report.params, static_cast<long long>(n), options.replicas,
            options.band_level, options.seed);
        lo = band.lower;
        hi = band.upper;
      } catch (const Error&) {
        std::fill(lo.begin(), lo.end(), kNan);
        std::fill(hi.begin(), hi.end(), kNan);
      }
    }
  }
  run.plot.header = {"rank", "observed", "fitted", "band_low", "band_high"};
  for (std::size_t i = 0; i < n; ++i) {
    run.plot.rows.push_back({num(sample.ranks[i]), num(sample.sizes[i]),
                             num(fitted[i]), num(lo[i]), num(hi[i])});
  }
  run.document = report::fit_report_json(
      run.report, fit_config(ds, group, run.year, options, "fit"));
  return run;
}

ScaleRun run_scale(const Dataset& ds, const std::vector<std::string>& groups,
                   long long year, const FitOptions& fit_options) {
  std::vector<std::string> names = groups.empty() ? group_names(ds) : groups;
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());

  ScaleRun run;
  double lo_rp = std::numeric_limits<double>::infinity();
  double hi_rp = 0.0;
  json index = json::array();
  for (const std::string& g : names) {
    ScaleGroup sg;
    sg.group = g;
    sg.year = resolve_year(ds, g, year);
    const RankedSample sample = slice_ranked(ds, g, sg.year);
    sg.fit = estimation::fit_rank_q1(sample, fit_options.n_total,
                                     fit_options.fit_n);
    json entry;
    entry["group"] = g;
    entry["year"] = sg.year;
    entry["n_c"] = static_cast<long long>(sample.n_c());
    entry["converged"] = sg.fit.converged;
    if (!sg.fit.converged) {
      // Missing fits are reported per group, the rest still scale.
      entry["error"] = sg.fit.detail;
      index.push_back(entry);
      run.groups.push_back(std::move(sg));
      continue;
    }
    const ModelParams& p = sg.fit.params;
    const ScaledCurve curve = model::gamma_scale(sample, p);
    sg.curve.header = {"rank", "size", "scaled_rank", "scaled_size"};
    for (std::size_t i = 0; i < sample.n_c(); ++i) {
      sg.curve.rows.push_back({num(sample.ranks[i]), num(sample.sizes[i]),
                               num(curve.ranks[i]), num(curve.sizes[i])});
    }
    const double gamma0 = std::exp(specfun::upper_gamma_ln(0.0, p.lambda));
    lo_rp = std::min(lo_rp, 0.5 * gamma0 / static_cast<double>(sample.n_c()));
    hi_rp = std::max(hi_rp, gamma0);
    entry["lambda"] = p.lambda;
    entry["x0"] = p.x0;
    entry["n_total"] = p.n_total;
    entry["R"] = sg.fit.correlation;
    index.push_back(entry);
    run.groups.push_back(std::move(sg));
  }
  if (!(hi_rp > 0.0) || !std::isfinite(lo_rp)) {
    throw InfeasibleError("scale: no group produced a usable q=1 fit");
  }

  // Analytic collapse target on a log grid; the top endpoint r' equals
  // Gamma(0, lambda) of some group, where the curve passes through
  // (Gamma(0, lambda), lambda) exactly.
  const int m = 200;
  std::vector<double> log_rp(m);
  const double l0 = std::log(lo_rp), l1 = std::log(hi_rp);
  for (int i = 0; i < m; ++i) {
    log_rp[i] = l0 + (l1 - l0) * i / (m - 1);
  }
  std::vector<double> xp(m);
  specfun::inverse_upper_gamma_sorted(0.0, log_rp.data(), xp.data(), m);
  run.master.header = {"scaled_rank", "scaled_size"};
  for (int i = 0; i < m; ++i) {
    run.master.rows.push_back({num(std::exp(log_rp[i])), num(xp[i])});
  }

  json cfg = source_json(ds);
  cfg["command"] = "scale";
  cfg["groups"] = names;
  cfg["year"] = year;
  cfg["n_total"] = fit_options.n_total;
  cfg["fit_n"] = fit_options.fit_n;
  cfg["master_points"] = m;
  run.document = json();
  run.document["groups"] = index;
  run.document["config"] = cfg;
  return run;
}

BandRun run_band(const Dataset& ds, const std::string& group, long long year,
                 const FitOptions& options) {
  if (!(options.band_level > 0.0) || !(options.band_level < 1.0)) {
    throw DomainError("band level must be inside (0, 1)");
  }
  BandRun run;
  run.year = resolve_year(ds, group, year);
  const RankedSample sample = slice_ranked(ds, group, run.year);
  run.report = dispatch_fit(sample, options);
  if (run.report.outcome == estimation::FitOutcome::not_converged) {
    throw ConvergenceError("band: the underlying fit did not converge (" +
                           run.report.detail + ")");
  }
  run.band = sampling::confidence_band(
      run.report.params, static_cast<long long>(sample.n_c()),
      options.replicas, options.band_level, options.seed);
  run.table.header = {"rank", "observed", "band_low", "band_high"};
  for (std::size_t i = 0; i < sample.n_c(); ++i) {
    run.table.rows.push_back({num(sample.ranks[i]), num(sample.sizes[i]),
                              num(run.band.lower[i]), num(run.band.upper[i])});
  }
  run.document = report::fit_report_json(
      run.report, fit_config(ds, group, run.year, options, "band"));
  return run;
}

DynamicsRun run_dynamics(const Dataset& ds, const std::string& group,
                         const DynamicsOptions& options) {
  std::vector<PanelRecord> slice;
  for (const PanelRecord& rec : ds.panel) {
    if (group.empty() || rec.group == group) slice.push_back(rec);
  }
  if (slice.empty()) {
    throw DomainError("no records for group '" + group + "'");
  }
  DynamicsRun run;
  const auto points = dynamics::panel_to_points(slice);
  if (points.empty()) {
    throw DomainError("group '" + group +
                      "' has no unit observed in two consecutive years");
  }
  run.bins = dynamics::bin_points(points, options.delta_u,
                                  options.min_bin_frac);
  run.fit = dynamics::fit_dynamics(run.bins, options.weighted);
  run.bin_table.header = {"bin_center", "mean_udot", "std_udot", "count"};
  for (std::size_t i = 0; i < run.bins.bin_center.size(); ++i) {
    run.bin_table.rows.push_back(
        {num(run.bins.bin_center[i]), num(run.bins.mean_udot[i]),
         num(run.bins.std_udot[i]), std::to_string(run.bins.count[i])});
  }
  json cfg = source_json(ds);
  cfg["command"] = "dynamics";
  cfg["group"] = group;
  cfg["delta_u"] = options.delta_u;
  cfg["min_bin_frac"] = options.min_bin_frac;
  cfg["weighted"] = options.weighted;
  run.document = report::dynamics_fit_json(run.fit, cfg);
  return run;
}

CompareQRun run_compare_q(const Dataset& ds, const CompareQOptions& options) {
  if (!ds.has_groups()) {
    throw DomainError("compare-q needs a dataset with a group column");
  }
  std::vector<std::string> names = group_names(ds);
  std::sort(names.begin(), names.end());
  if (names.size() < 2) {
    throw DomainError("compare-q needs at least 2 groups, got " +
                      std::to_string(names.size()));
  }

  CompareQRun run;
  for (const std::string& g : names) {
    CompareQRow row;
    row.group = g;
    row.q_maxent = kNan;
    row.q_maxent_std = kNan;
    row.q_dynamics = kNan;
    row.q_dynamics_std = kNan;
    try {
      row.year = resolve_year(ds, g, options.year);
      const RankedSample sample = slice_ranked(ds, g, row.year);
      row.n_c = static_cast<long long>(sample.n_c());
      const estimation::FitReport rep =
          estimation::consistency_workflow(sample, options.workflow);
      row.maxent_outcome = rep.outcome;
      if (rep.outcome != estimation::FitOutcome::not_converged) {
        row.q_maxent = rep.params.q;
        if (rep.stderrs.count("q")) row.q_maxent_std = rep.stderrs.at("q");
      }
    } catch (const Error&) {
      row.maxent_outcome = estimation::FitOutcome::not_converged;
    }
    try {
      const DynamicsRun dyn = run_dynamics(ds, g, options.dynamics);
      row.q_dynamics = dyn.fit.q;
      row.q_dynamics_std = dyn.fit.q_std;
      row.well_defined = dyn.fit.well_defined;
    } catch (const Error&) {
      row.well_defined = false;
    }
    run.rows.push_back(std::move(row));
  }

  // The comparison uses only rows where both estimates stand on their own.
  std::vector<double> xs, ys;
  for (const CompareQRow& row : run.rows) {
    if (!row.well_defined) ++run.groups_flagged;
    if (row.well_defined &&
        row.maxent_outcome == estimation::FitOutcome::converged &&
        std::isfinite(row.q_maxent) && std::isfinite(row.q_dynamics)) {
      xs.push_back(row.q_maxent);
      ys.push_back(row.q_dynamics);
    }
  }
  run.groups_used = static_cast<long long>(xs.size());
  run.slope = kNan;
  run.r = kNan;
  if (!xs.empty()) {
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += xs[i] * ys[i];
      sxx += xs[i] * xs[i];
    }
    if (sxx > 0.0) run.slope = sxy / sxx;
    if (xs.size() >= 2) {
      try {
        run.r = estimation::pearson_r(xs, ys);
      } catch (const Error&) {
        run.r = kNan;
      }
    }
  }

  run.table.header = {"group",     "year",          "n_c",
                      "q_maxent",  "q_maxent_std",  "maxent_outcome",
                      "q_dynamics", "q_dynamics_std", "well_defined"};
  json rows = json::array();
  for (const CompareQRow& row : run.rows) {
    run.table.rows.push_back(
        {row.group, std::to_string(row.year), std::to_string(row.n_c),
         num(row.q_maxent), num(row.q_maxent_std),
         estimation::outcome_name(row.maxent_outcome), num(row.q_dynamics),
         num(row.q_dynamics_std), row.well_defined ? "true" : "false"});
    json r;
    r["group"] = row.group;
    r["year"] = row.year;
    r["n_c"] = row.n_c;
    r["q_maxent"] = std::isfinite(row.q_maxent) ? json(row.q_maxent) : json();
    r["q_maxent_std"] =
        std::isfinite(row.q_maxent_std) ? json(row.q_maxent_std) : json();
    r["maxent_outcome"] = estimation::outcome_name(row.maxent_outcome);
    r["q_dynamics"] =
        std::isfinite(row.q_dynamics) ? json(row.q_dynamics) : json();
    r["q_dynamics_std"] =
        std::isfinite(row.q_dynamics_std) ? json(row.q_dynamics_std) : json();
    r["well_defined"] = row.well_defined;
    rows.push_back(r);
  }
  json summary;
  summary["slope_through_origin"] =
      std::isfinite(run.slope) ? json(run.slope) : json();
  summary["R"] = std::isfinite(run.r) ? json(run.r) : json();
  summary["groups_used"] = run.groups_used;
  summary["groups_flagged"] = run.groups_flagged;
  json cfg = source_json(ds);
  cfg["command"] = "compare-q";
  cfg["year"] = options.year;
  cfg["delta_u"] = options.dynamics.delta_u;
  cfg["min_bin_frac"] = options.dynamics.min_bin_frac;
  cfg["weighted"] = options.dynamics.weighted;
  cfg["agree_q"] = options.workflow.agree_q;
  cfg["agree_log_lambda"] = options.workflow.agree_log_lambda;
  cfg["exclude_head"] = options.workflow.head_cap;
  cfg["exclude_tail"] = options.workflow.tail_cap;
  run.document = json();
  run.document["groups"] = rows;
  run.document["summary"] = summary;
  run.document["config"] = cfg;
  return run;
}

}  // namespace rankent::workflows
