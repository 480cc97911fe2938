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

#include "rankent/rankent.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "estimation.hpp"
#include "growthsim.hpp"
#include "panel.hpp"
#include "report.hpp"
#include "workflows.hpp"

namespace {

using rankent::Dataset;
using rankent::Error;
using rankent::ErrorCode;

thread_local std::string g_last_error;

rankent_status status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return RANKENT_E_INVALID_ARGUMENT;
    case ErrorCode::domain: return RANKENT_E_DOMAIN;
    case ErrorCode::parse: return RANKENT_E_PARSE;
    case ErrorCode::validation: return RANKENT_E_VALIDATION;
    case ErrorCode::no_convergence: return RANKENT_E_NO_CONVERGENCE;
    case ErrorCode::infeasible: return RANKENT_E_INFEASIBLE;
    case ErrorCode::io: return RANKENT_E_IO;
    case ErrorCode::internal: return RANKENT_E_INTERNAL;
  }
  return RANKENT_E_INTERNAL;
}

// Every entry point funnels through here so exceptions never cross the
// ABI boundary.
template <typename Fn>
rankent_status guarded(Fn&& fn) {
  try {
    fn();
    return RANKENT_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RANKENT_E_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return RANKENT_E_INTERNAL;
  }
}

rankent_status invalid(const char* message) {
  g_last_error = message;
  return RANKENT_E_INVALID_ARGUMENT;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

rankent::workflows::FitOptions to_fit_options(const rankent_fit_options& o) {
  if (o.mode < 0 || o.mode > 3) {
    throw rankent::DomainError("fit mode out of range");
  }
  rankent::workflows::FitOptions out;
  out.mode = static_cast<rankent::workflows::FitMode>(o.mode);
  out.n_total = o.n_total;
  out.fit_n = o.fit_n != 0;
  out.with_drift = o.with_drift != 0;
  out.exclude_head = o.exclude_head;
  out.exclude_tail = o.exclude_tail;
  out.agree_q = o.agree_q;
  out.agree_log_lambda = o.agree_log_lambda;
  out.with_band = o.with_band != 0;
  out.band_level = o.band_level;
  out.replicas = o.replicas;
  out.seed = o.seed;
  return out;
}

rankent::workflows::DynamicsOptions to_dynamics_options(
    const rankent_dynamics_options& o) {
  rankent::workflows::DynamicsOptions out;
  out.delta_u = o.delta_u;
  out.min_bin_frac = o.min_bin_frac;
  out.weighted = o.weighted != 0;
  return out;
}

rankent_outcome outcome_of(const rankent::estimation::FitReport& rep) {
  switch (rep.outcome) {
    case rankent::estimation::FitOutcome::converged:
      return RANKENT_OUTCOME_OK;
    case rankent::estimation::FitOutcome::not_converged:
      return RANKENT_OUTCOME_NOT_CONVERGED;
    case rankent::estimation::FitOutcome::declared_failure:
      return RANKENT_OUTCOME_DECLARED_FAILURE;
  }
  return RANKENT_OUTCOME_NOT_CONVERGED;
}

}  // namespace

struct rankent_dataset {
  Dataset ds;
};

struct rankent_result {
  std::string document;
  std::vector<std::pair<std::string, std::string>> tables;  // name, csv
  rankent_outcome outcome = RANKENT_OUTCOME_OK;
};

extern "C" {

const char* rankent_last_error(void) { return g_last_error.c_str(); }

const char* rankent_version(void) { return "0.1.0"; }

void rankent_string_free(char* s) { std::free(s); }

rankent_status rankent_dataset_open(const char* path, rankent_dataset** out) {
  if (!path || !out) return invalid("dataset_open: null argument");
  return guarded([&] {
    auto handle = new rankent_dataset{rankent::ingest(path)};
    *out = handle;
  });
}

void rankent_dataset_close(rankent_dataset* ds) { delete ds; }

rankent_status rankent_dataset_summary(const rankent_dataset* ds,
                                       char** json_out) {
  if (!ds || !json_out) return invalid("dataset_summary: null argument");
  return guarded([&] {
    std::set<std::string> units;
    std::set<long long> years;
    for (const auto& rec : ds->ds.panel) {
      units.insert(rec.unit_id);
      years.insert(rec.year);
    }
    nlohmann::json doc;
    doc["source"] = ds->ds.source_path;
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(ds->ds.checksum));
    doc["checksum"] = buf;
    doc["records"] = ds->ds.panel.size();
    doc["units"] = units.size();
    doc["years"] = years.size();
    if (!years.empty()) {
      doc["year_min"] = *years.begin();
      doc["year_max"] = *years.rbegin();
    }
    doc["groups"] = ds->ds.has_groups()
                        ? nlohmann::json(rankent::group_names(ds->ds).size())
                        : nlohmann::json(0);
    *json_out = dup_string(rankent::report::render(doc));
  });
}

rankent_status rankent_dataset_group_count(const rankent_dataset* ds,
                                           int64_t* out) {
  if (!ds || !out) return invalid("group_count: null argument");
  return guarded(
      [&] { *out = static_cast<int64_t>(rankent::group_names(ds->ds).size()); });
}

rankent_status rankent_dataset_group_name(const rankent_dataset* ds,
                                          int64_t index, char** out) {
  if (!ds || !out) return invalid("group_name: null argument");
  return guarded([&] {
    auto names = rankent::group_names(ds->ds);
    std::sort(names.begin(), names.end());
    if (index < 0 || static_cast<std::size_t>(index) >= names.size()) {
      throw rankent::DomainError("group index out of range");
    }
    *out = dup_string(names[static_cast<std::size_t>(index)]);
  });
}

void rankent_result_close(rankent_result* res) { delete res; }

rankent_status rankent_result_document(const rankent_result* res,
                                       char** json_out) {
  if (!res || !json_out) return invalid("result_document: null argument");
  return guarded([&] { *json_out = dup_string(res->document); });
}

rankent_status rankent_result_outcome(const rankent_result* res, int* out) {
  if (!res || !out) return invalid("result_outcome: null argument");
  *out = res->outcome;
  return RANKENT_OK;
}

rankent_status rankent_result_table_count(const rankent_result* res,
                                          int64_t* out) {
  if (!res || !out) return invalid("table_count: null argument");
  *out = static_cast<int64_t>(res->tables.size());
  return RANKENT_OK;
}

rankent_status rankent_result_table_name(const rankent_result* res,
                                         int64_t index, char** out) {
  if (!res || !out) return invalid("table_name: null argument");
  return guarded([&] {
    if (index < 0 || static_cast<std::size_t>(index) >= res->tables.size()) {
      throw rankent::DomainError("table index out of range");
    }
    *out = dup_string(res->tables[static_cast<std::size_t>(index)].first);
  });
}

rankent_status rankent_result_table_csv(const rankent_result* res,
                                        int64_t index, char** out) {
  if (!res || !out) return invalid("table_csv: null argument");
  return guarded([&] {
    if (index < 0 || static_cast<std::size_t>(index) >= res->tables.size()) {
      throw rankent::DomainError("table index out of range");
    }
    *out = dup_string(res->tables[static_cast<std::size_t>(index)].second);
  });
}

void rankent_fit_options_init(rankent_fit_options* o) {
  if (!o) return;
  const rankent::workflows::FitOptions d;
  o->mode = RANKENT_FIT_Q1;
  o->n_total = d.n_total;
  o->fit_n = d.fit_n ? 1 : 0;
  o->with_drift = d.with_drift ? 1 : 0;
  o->exclude_head = d.exclude_head;
  o->exclude_tail = d.exclude_tail;
  o->agree_q = d.agree_q;
  o->agree_log_lambda = d.agree_log_lambda;
  o->with_band = d.with_band ? 1 : 0;
  o->band_level = d.band_level;
  o->replicas = d.replicas;
  o->seed = d.seed;
}

rankent_status rankent_run_fit(const rankent_dataset* ds, const char* group,
                               int64_t year,
                               const rankent_fit_options* options,
                               rankent_result** out) {
  if (!ds || !group || !options || !out) {
    return invalid("run_fit: null argument");
  }
  return guarded([&] {
    const auto run = rankent::workflows::run_fit(ds->ds, group, year,
                                                 to_fit_options(*options));
    auto res = new rankent_result;
    res->document = rankent::report::render(run.document);
    res->tables.emplace_back("plot", rankent::report::to_csv(run.plot));
    res->outcome = outcome_of(run.report);
    *out = res;
  });
}

rankent_status rankent_run_band(const rankent_dataset* ds, const char* group,
                                int64_t year,
                                const rankent_fit_options* options,
                                rankent_result** out) {
  if (!ds || !group || !options || !out) {
    return invalid("run_band: null argument");
  }
  return guarded([&] {
    const auto run = rankent::workflows::run_band(ds->ds, group, year,
                                                  to_fit_options(*options));
    auto res = new rankent_result;
    res->document = rankent::report::render(run.document);
    res->tables.emplace_back("band", rankent::report::to_csv(run.table));
    res->outcome = outcome_of(run.report);
    *out = res;
  });
}

rankent_status rankent_run_scale(const rankent_dataset* ds,
                                 const char* const* groups, int64_t n_groups,
                                 int64_t year,
                                 const rankent_fit_options* options,
                                 rankent_result** out) {
  if (!ds || !options || !out || (n_groups > 0 && !groups)) {
    return invalid("run_scale: null argument");
  }
  return guarded([&] {
    std::vector<std::string> names;
    for (int64_t i = 0; i < n_groups; ++i) {
      if (!groups[i]) throw rankent::DomainError("null group name");
      names.emplace_back(groups[i]);
    }
    const auto run = rankent::workflows::run_scale(ds->ds, names, year,
                                                   to_fit_options(*options));
    auto res = new rankent_result;
    res->document = rankent::report::render(run.document);
    for (const auto& g : run.groups) {
      if (g.curve.rows.empty()) continue;  // failed fit, listed in document
      res->tables.emplace_back("group:" + g.group,
                               rankent::report::to_csv(g.curve));
    }
    res->tables.emplace_back("master", rankent::report::to_csv(run.master));
    *out = res;
  });
}

void rankent_dynamics_options_init(rankent_dynamics_options* o) {
  if (!o) return;
  const rankent::workflows::DynamicsOptions d;
  o->delta_u = d.delta_u;
  o->min_bin_frac = d.min_bin_frac;
  o->weighted = d.weighted ? 1 : 0;
}

rankent_status rankent_run_dynamics(const rankent_dataset* ds,
                                    const char* group,
                                    const rankent_dynamics_options* options,
                                    rankent_result** out) {
  if (!ds || !group || !options || !out) {
    return invalid("run_dynamics: null argument");
  }
  return guarded([&] {
    const auto run = rankent::workflows::run_dynamics(
        ds->ds, group, to_dynamics_options(*options));
    auto res = new rankent_result;
    res->document = rankent::report::render(run.document);
    res->tables.emplace_back("bins", rankent::report::to_csv(run.bin_table));
    *out = res;
  });
}

void rankent_compare_options_init(rankent_compare_options* o) {
  if (!o) return;
  const rankent::workflows::CompareQOptions d;
  o->year = d.year;
  rankent_dynamics_options_init(&o->dynamics);
  o->agree_q = d.workflow.agree_q;
  o->agree_log_lambda = d.workflow.agree_log_lambda;
  o->exclude_head = d.workflow.head_cap;
  o->exclude_tail = d.workflow.tail_cap;
}

rankent_status rankent_run_compare_q(const rankent_dataset* ds,
                                     const rankent_compare_options* options,
                                     rankent_result** out) {
  if (!ds || !options || !out) return invalid("run_compare_q: null argument");
  return guarded([&] {
    rankent::workflows::CompareQOptions opt;
    opt.year = options->year;
    opt.dynamics = to_dynamics_options(options->dynamics);
    opt.workflow.agree_q = options->agree_q;
    opt.workflow.agree_log_lambda = options->agree_log_lambda;
    opt.workflow.head_cap = options->exclude_head;
    opt.workflow.tail_cap = options->exclude_tail;
    const auto run = rankent::workflows::run_compare_q(ds->ds, opt);
    auto res = new rankent_result;
    res->document = rankent::report::render(run.document);
    res->tables.emplace_back("comparison",
                             rankent::report::to_csv(run.table));
    *out = res;
  });
}

void rankent_sim_options_init(rankent_sim_options* o) {
  if (!o) return;
  const rankent::growthsim::SimConfig d;
  o->n_units = d.n_units;
  o->q = d.q;
  o->k1_mean = d.k1_mean;
  o->k1_std = d.k1_std;
  o->kq_mean = d.kq_mean;
  o->kq_std = d.kq_std;
  o->finite_size_noise = d.finite_size_noise ? 1 : 0;
  o->rates_per_unit = d.rates_per_step ? 0 : 1;
  o->dt = d.dt;
  o->steps = d.steps;
  o->year0 = d.year0;
  o->ceiling = d.ceiling;
  o->init_kind = RANKENT_INIT_FIXED;
  o->init_value = d.init.value;
  o->init_lo = d.init.lo;
  o->init_hi = d.init.hi;
  o->init_q = d.init.params.q;
  o->init_lambda = d.init.params.lambda;
  o->init_x0 = d.init.params.x0;
  o->init_sigma = d.init.params.sigma;
  o->seed = d.seed;
}

rankent_status rankent_simulate(const rankent_sim_options* options,
                                rankent_result** out) {
  if (!options || !out) return invalid("simulate: null argument");
  return guarded([&] {
    if (options->init_kind < 0 || options->init_kind > 2) {
      throw rankent::DomainError("init kind out of range");
    }
    rankent::growthsim::SimConfig cfg;
    cfg.n_units = options->n_units;
    cfg.q = options->q;
    cfg.k1_mean = options->k1_mean;
    cfg.k1_std = options->k1_std;
    cfg.kq_mean = options->kq_mean;
    cfg.kq_std = options->kq_std;
    cfg.finite_size_noise = options->finite_size_noise != 0;
    cfg.rates_per_step = options->rates_per_unit == 0;
    cfg.dt = options->dt;
    cfg.steps = options->steps;
    cfg.year0 = options->year0;
    cfg.ceiling = options->ceiling;
    cfg.init.kind =
        static_cast<rankent::growthsim::InitLaw::Kind>(options->init_kind);
    cfg.init.value = options->init_value;
    cfg.init.lo = options->init_lo;
    cfg.init.hi = options->init_hi;
    cfg.init.params.q = options->init_q;
    cfg.init.params.lambda = options->init_lambda;
    cfg.init.params.x0 = options->init_x0;
    cfg.init.params.sigma = options->init_sigma;
    cfg.seed = options->seed;
    const auto panel = rankent::growthsim::simulate(cfg);

    nlohmann::json doc;
    nlohmann::json c;
    c["command"] = "simulate";
    c["n_units"] = cfg.n_units;
    c["q"] = cfg.q;
    c["k1_mean"] = cfg.k1_mean;
    c["k1_std"] = cfg.k1_std;
    c["kq_mean"] = cfg.kq_mean;
    c["kq_std"] = cfg.kq_std;
    c["finite_size_noise"] = cfg.finite_size_noise;
    c["rates_per_step"] = cfg.rates_per_step;
    c["dt"] = cfg.dt;
    c["steps"] = cfg.steps;
    c["year0"] = cfg.year0;
    c["ceiling"] = cfg.ceiling;
    c["init_kind"] = options->init_kind;
    c["init_value"] = cfg.init.value;
    c["init_lo"] = cfg.init.lo;
    c["init_hi"] = cfg.init.hi;
    c["init_q"] = cfg.init.params.q;
    c["init_lambda"] = cfg.init.params.lambda;
    c["init_x0"] = cfg.init.params.x0;
    c["init_sigma"] = cfg.init.params.sigma;
    c["seed"] = cfg.seed;
    doc["records"] = panel.size();
    doc["config"] = c;
    auto res = new rankent_result;
    res->document = rankent::report::render(doc);
    res->tables.emplace_back("panel", rankent::panel_csv(panel));
    *out = res;
  });
}

}  // extern "C"
