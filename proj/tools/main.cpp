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

// Command-line front end.  Everything analytic happens behind the shared
// library's C surface; this file only parses flags, shuttles strings, and
// writes files.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rankent/rankent.h"

namespace fs = std::filesystem;

namespace {

// Process exit codes, one per failure class so scripts can branch on them.
enum ExitCode {
  kOk = 0,
  kUsage = 1,          // CLI11's own parse failures
  kParse = 2,          // malformed input file
  kValidation = 3,     // well-formed file with invalid content
  kNoConvergence = 4,  // a fit did not converge
  kDeclaredFailure = 5,  // consistency workflow gave up within its caps
  kDomain = 6,         // bad parameter/argument values
  kIo = 7,
  kInternal = 8,
};

int exit_code_of(rankent_status st) {
  switch (st) {
    case RANKENT_OK: return kOk;
    case RANKENT_E_PARSE: return kParse;
    case RANKENT_E_VALIDATION: return kValidation;
    case RANKENT_E_NO_CONVERGENCE: return kNoConvergence;
    case RANKENT_E_IO: return kIo;
    case RANKENT_E_INTERNAL: return kInternal;
    case RANKENT_E_INVALID_ARGUMENT:
    case RANKENT_E_DOMAIN:
    case RANKENT_E_INFEASIBLE: return kDomain;
  }
  return kInternal;
}

int exit_code_of_outcome(int outcome) {
  switch (outcome) {
    case RANKENT_OUTCOME_OK: return kOk;
    case RANKENT_OUTCOME_NOT_CONVERGED: return kNoConvergence;
    case RANKENT_OUTCOME_DECLARED_FAILURE: return kDeclaredFailure;
  }
  return kInternal;
}

int fail(rankent_status st) {
  std::fprintf(stderr, "rankent: %s\n", rankent_last_error());
  return exit_code_of(st);
}

struct CStr {
  char* p = nullptr;
  ~CStr() { rankent_string_free(p); }
  CStr() = default;
  CStr(const CStr&) = delete;
  CStr& operator=(const CStr&) = delete;
};

struct DatasetHandle {
  rankent_dataset* ds = nullptr;
  ~DatasetHandle() { rankent_dataset_close(ds); }
};

struct ResultHandle {
  rankent_result* res = nullptr;
  ~ResultHandle() { rankent_result_close(res); }
};

// Group names become file-name fragments; anything shell-hostile is
// flattened to '_' and the empty group is spelled "all".
std::string slug(const std::string& group) {
  if (group.empty()) return "all";
  std::string out;
  for (char c : group) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '.' || c == '-' || c == '_';
    out += ok ? c : '_';
  }
  return out;
}

int write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::fprintf(stderr, "rankent: cannot write %s\n", path.string().c_str());
    return kIo;
  }
  out << content;
  out.flush();
  if (!out) {
    std::fprintf(stderr, "rankent: write failed on %s\n",
                 path.string().c_str());
    return kIo;
  }
  std::printf("%s\n", path.string().c_str());
  return kOk;
}

int ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    std::fprintf(stderr, "rankent: cannot create %s: %s\n",
                 dir.string().c_str(), ec.message().c_str());
    return kIo;
  }
  return kOk;
}

// Groups to operate on: the explicit one, or every group in the dataset.
std::vector<std::string> target_groups(rankent_dataset* ds,
                                       const std::string& group,
                                       bool group_given) {
  if (group_given) return {group};
  std::vector<std::string> out;
  int64_t count = 0;
  if (rankent_dataset_group_count(ds, &count) != RANKENT_OK || count <= 0) {
    return {""};
  }
  for (int64_t i = 0; i < count; ++i) {
    CStr name;
    if (rankent_dataset_group_name(ds, i, &name.p) != RANKENT_OK) return {""};
    out.emplace_back(name.p);
  }
  return out;
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') {
      out += '\\';
      out += c;
    } else if (static_cast<unsigned char>(c) < 0x20) {
      char buf[8];
      std::snprintf(buf, sizeof buf, "\\u%04x", c);
      out += buf;
    } else {
      out += c;
    }
  }
  return out;
}

// Writes a result's document and tables under out_dir with the verb as the
// file-name stem; appends one index entry line describing what was written.
int write_result(rankent_result* res, const fs::path& out_dir,
                 const std::string& stem, const std::string& table_suffix,
                 std::string* index_entries) {
  CStr doc;
  rankent_status st = rankent_result_document(res, &doc.p);
  if (st != RANKENT_OK) return fail(st);
  const fs::path doc_path = out_dir / (stem + ".json");
  int rc = write_file(doc_path, doc.p);
  if (rc != kOk) return rc;
  std::string files = "\"" + json_escape(doc_path.filename().string()) + "\"";

  int64_t tables = 0;
  st = rankent_result_table_count(res, &tables);
  if (st != RANKENT_OK) return fail(st);
  for (int64_t i = 0; i < tables; ++i) {
    CStr name, csv;
    st = rankent_result_table_name(res, i, &name.p);
    if (st != RANKENT_OK) return fail(st);
    st = rankent_result_table_csv(res, i, &csv.p);
    if (st != RANKENT_OK) return fail(st);
    std::string tname = name.p;
    std::string fname;
    if (tname.rfind("group:", 0) == 0) {
      fname = stem + "_" + slug(tname.substr(6)) + ".csv";
    } else if (tables == 1 && !table_suffix.empty()) {
      fname = stem + "_" + table_suffix + ".csv";
    } else {
      fname = stem + "_" + slug(tname) + ".csv";
    }
    rc = write_file(out_dir / fname, csv.p);
    if (rc != kOk) return rc;
    files += ",\"" + json_escape(fname) + "\"";
  }
  if (index_entries) {
    if (!index_entries->empty()) *index_entries += ",\n";
    *index_entries += "    {\"stem\": \"" + json_escape(stem) +
                      "\", \"files\": [" + files + "]}";
  }
  return kOk;
}

int write_index(const fs::path& out_dir, const std::string& command,
                const std::string& entries) {
  const std::string body = "{\n  \"command\": \"" + command +
                           "\",\n  \"outputs\": [\n" + entries + "\n  ]\n}\n";
  return write_file(out_dir / "index.json", body);
}

struct CommonFitFlags {
  std::string input;
  std::string group;
  bool group_given = false;
  long long year = 0;
  std::string mode = "q1";
  double n_total;
  bool fit_n;
  bool with_drift;
  int exclude_head;
  int exclude_tail;
  double agree_q;
  double agree_log_lambda;
  bool no_band;
  double level;
  long long replicas;
  unsigned long long seed;
  std::string out_dir = ".";

  // Flag defaults come from the library init so the CLI cannot disagree
  // with direct API callers.
  CommonFitFlags() {
    rankent_fit_options o;
    rankent_fit_options_init(&o);
    n_total = o.n_total;
    fit_n = o.fit_n != 0;
    with_drift = o.with_drift != 0;
    exclude_head = o.exclude_head;
    exclude_tail = o.exclude_tail;
    agree_q = o.agree_q;
    agree_log_lambda = o.agree_log_lambda;
    no_band = o.with_band == 0;
    level = o.band_level;
    replicas = o.replicas;
    seed = o.seed;
  }
};

void add_fit_flags(CLI::App* cmd, CommonFitFlags* f, bool with_band_flags) {
  cmd->add_option("input", f->input, "panel CSV file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--group", f->group, "group to fit (default: every group)")
      ->trigger_on_parse()
      ->each([f](const std::string&) { f->group_given = true; });
  cmd->add_option("--year", f->year, "cross-section year (default: latest)");
  cmd->add_option("--mode", f->mode, "q1 | q | moments | consistency")
      ->check(CLI::IsMember({"q1", "q", "moments", "consistency"}));
  cmd->add_option("--n-total", f->n_total,
                  "external aggregate for q1 mode (default: sample sum)");
  cmd->add_flag("--fit-n", f->fit_n, "estimate the aggregate in q1 mode");
  cmd->add_flag("--with-drift", f->with_drift,
                "include lognormal drift (q and moments modes)");
  cmd->add_option("--exclude-head", f->exclude_head,
                  "consistency mode: max large-end exclusions");
  cmd->add_option("--exclude-tail", f->exclude_tail,
                  "consistency mode: max small-end exclusions");
  cmd->add_option("--agree-q", f->agree_q,
                  "consistency mode: q agreement tolerance");
  cmd->add_option("--agree-log-lambda", f->agree_log_lambda,
                  "consistency mode: log lambda agreement tolerance");
  if (with_band_flags) {
    cmd->add_flag("--no-band", f->no_band, "skip the sampling band");
    cmd->add_option("--level", f->level, "band central coverage in (0,1)");
    cmd->add_option("--replicas", f->replicas, "band replicas (>= 1000)");
    cmd->add_option("--seed", f->seed, "band replica seed");
  }
  cmd->add_option("--out-dir", f->out_dir, "output directory (default: .)");
}

rankent_fit_options to_options(const CommonFitFlags& f) {
  rankent_fit_options o;
  rankent_fit_options_init(&o);
  if (f.mode == "q1") o.mode = RANKENT_FIT_Q1;
  if (f.mode == "q") o.mode = RANKENT_FIT_Q;
  if (f.mode == "moments") o.mode = RANKENT_FIT_MOMENTS;
  if (f.mode == "consistency") o.mode = RANKENT_FIT_CONSISTENCY;
  o.n_total = f.n_total;
  o.fit_n = f.fit_n ? 1 : 0;
  o.with_drift = f.with_drift ? 1 : 0;
  o.exclude_head = f.exclude_head;
  o.exclude_tail = f.exclude_tail;
  o.agree_q = f.agree_q;
  o.agree_log_lambda = f.agree_log_lambda;
  o.with_band = f.no_band ? 0 : 1;
  o.band_level = f.level;
  o.replicas = f.replicas;
  o.seed = f.seed;
  return o;
}

int cmd_ingest_check(const std::string& input) {
  DatasetHandle ds;
  rankent_status st = rankent_dataset_open(input.c_str(), &ds.ds);
  if (st != RANKENT_OK) return fail(st);
  CStr summary;
  st = rankent_dataset_summary(ds.ds, &summary.p);
  if (st != RANKENT_OK) return fail(st);
  std::fputs(summary.p, stdout);
  return kOk;
}

// fit and band share the per-group fan-out; `banded` picks the API call.
int cmd_fit_like(const CommonFitFlags& f, bool banded) {
  DatasetHandle ds;
  rankent_status st = rankent_dataset_open(f.input.c_str(), &ds.ds);
  if (st != RANKENT_OK) return fail(st);
  if (ensure_dir(f.out_dir) != kOk) return kIo;
  const rankent_fit_options opts = to_options(f);
  const std::vector<std::string> groups =
      target_groups(ds.ds, f.group, f.group_given);
  const char* verb = banded ? "band" : "fit";

  int worst = kOk;
  std::string index_entries;
  for (const std::string& g : groups) {
    ResultHandle res;
    st = banded ? rankent_run_band(ds.ds, g.c_str(), f.year, &opts, &res.res)
                : rankent_run_fit(ds.ds, g.c_str(), f.year, &opts, &res.res);
    if (st != RANKENT_OK) {
      std::fprintf(stderr, "rankent: %s: %s\n", slug(g).c_str(),
                   rankent_last_error());
      worst = std::max(worst, exit_code_of(st));
      continue;
    }
    int outcome = 0;
    rankent_result_outcome(res.res, &outcome);
    worst = std::max(worst, exit_code_of_outcome(outcome));
    const std::string stem = std::string(verb) + "_" + slug(g);
    const int rc =
        write_result(res.res, f.out_dir, stem,
                     banded ? "" : "plot", &index_entries);
    if (rc != kOk) return rc;
  }
  if (groups.size() > 1) {
    const int rc = write_index(f.out_dir, verb, index_entries);
    if (rc != kOk) return rc;
  }
  return worst;
}

int cmd_scale(const CommonFitFlags& f, const std::vector<std::string>& groups) {
  DatasetHandle ds;
  rankent_status st = rankent_dataset_open(f.input.c_str(), &ds.ds);
  if (st != RANKENT_OK) return fail(st);
  if (ensure_dir(f.out_dir) != kOk) return kIo;
  rankent_fit_options opts = to_options(f);
  opts.mode = RANKENT_FIT_Q1;
  std::vector<const char*> names;
  names.reserve(groups.size());
  for (const std::string& g : groups) names.push_back(g.c_str());
  ResultHandle res;
  st = rankent_run_scale(ds.ds, names.empty() ? nullptr : names.data(),
                         static_cast<int64_t>(names.size()), f.year, &opts,
                         &res.res);
  if (st != RANKENT_OK) return fail(st);
  std::string index_entries;
  const int rc = write_result(res.res, f.out_dir, "scale", "", &index_entries);
  if (rc != kOk) return rc;
  return write_index(f.out_dir, "scale", index_entries);
}

int cmd_dynamics(const std::string& input, const std::string& group,
                 bool group_given, double delta_u, double min_bin_frac,
                 bool weighted, const std::string& out_dir) {
  DatasetHandle ds;
  rankent_status st = rankent_dataset_open(input.c_str(), &ds.ds);
  if (st != RANKENT_OK) return fail(st);
  if (ensure_dir(out_dir) != kOk) return kIo;
  rankent_dynamics_options opts;
  rankent_dynamics_options_init(&opts);
  opts.delta_u = delta_u;
  opts.min_bin_frac = min_bin_frac;
  opts.weighted = weighted ? 1 : 0;
  const std::vector<std::string> groups =
      target_groups(ds.ds, group, group_given);

  int worst = kOk;
  std::string index_entries;
  for (const std::string& g : groups) {
    ResultHandle res;
    st = rankent_run_dynamics(ds.ds, g.c_str(), &opts, &res.res);
    if (st != RANKENT_OK) {
      std::fprintf(stderr, "rankent: %s: %s\n", slug(g).c_str(),
                   rankent_last_error());
      worst = std::max(worst, exit_code_of(st));
      continue;
    }
    const int rc = write_result(res.res, out_dir, "dynamics_" + slug(g),
                                "bins", &index_entries);
    if (rc != kOk) return rc;
  }
  if (groups.size() > 1) {
    const int rc = write_index(out_dir, "dynamics", index_entries);
    if (rc != kOk) return rc;
  }
  return worst;
}

int cmd_compare_q(const std::string& input, long long year, double delta_u,
                  double min_bin_frac, bool weighted, double agree_q,
                  double agree_log_lambda, int exclude_head, int exclude_tail,
                  const std::string& out_dir) {
  DatasetHandle ds;
  rankent_status st = rankent_dataset_open(input.c_str(), &ds.ds);
  if (st != RANKENT_OK) return fail(st);
  if (ensure_dir(out_dir) != kOk) return kIo;
  rankent_compare_options opts;
  rankent_compare_options_init(&opts);
  opts.year = year;
  opts.dynamics.delta_u = delta_u;
  opts.dynamics.min_bin_frac = min_bin_frac;
  opts.dynamics.weighted = weighted ? 1 : 0;
  opts.agree_q = agree_q;
  opts.agree_log_lambda = agree_log_lambda;
  opts.exclude_head = exclude_head;
  opts.exclude_tail = exclude_tail;
  ResultHandle res;
  st = rankent_run_compare_q(ds.ds, &opts, &res.res);
  if (st != RANKENT_OK) return fail(st);
  return write_result(res.res, out_dir, "compare_q", "", nullptr);
}

struct SimFlags {
  long long units = 100;
  double q = 1.0;
  double k1 = 0.01;
  double k1_std = 0.0;
  double kq = 0.0;
  double kq_std = 0.0;
  bool finite_size_noise = false;
  bool rates_per_unit = false;
  double dt = 0.1;
  long long steps = 100;
  long long year0 = 2000;
  double ceiling = 1e12;
  std::string init = "fixed";
  double init_value = 1000.0;
  double init_lo = 50.0;
  double init_hi = 50000.0;
  double init_q = 1.0;
  double init_lambda = 0.01;
  double init_x0 = 100.0;
  double init_sigma = 0.0;
  unsigned long long seed = 1;
  std::string out_dir = ".";
};

int cmd_simulate(const SimFlags& f) {
  rankent_sim_options o;
  rankent_sim_options_init(&o);
  o.n_units = f.units;
  o.q = f.q;
  o.k1_mean = f.k1;
  o.k1_std = f.k1_std;
  o.kq_mean = f.kq;
  o.kq_std = f.kq_std;
  o.finite_size_noise = f.finite_size_noise ? 1 : 0;
  o.rates_per_unit = f.rates_per_unit ? 1 : 0;
  o.dt = f.dt;
  o.steps = f.steps;
  o.year0 = f.year0;
  o.ceiling = f.ceiling;
  if (f.init == "fixed") o.init_kind = RANKENT_INIT_FIXED;
  if (f.init == "log-uniform") o.init_kind = RANKENT_INIT_LOG_UNIFORM;
  if (f.init == "equilibrium") o.init_kind = RANKENT_INIT_EQUILIBRIUM;
  o.init_value = f.init_value;
  o.init_lo = f.init_lo;
  o.init_hi = f.init_hi;
  o.init_q = f.init_q;
  o.init_lambda = f.init_lambda;
  o.init_x0 = f.init_x0;
  o.init_sigma = f.init_sigma;
  o.seed = f.seed;
  ResultHandle res;
  const rankent_status st = rankent_simulate(&o, &res.res);
  if (st != RANKENT_OK) return fail(st);
  if (ensure_dir(f.out_dir) != kOk) return kIo;
  return write_result(res.res, f.out_dir, "simulate", "panel", nullptr);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rank-size distributions, scaling, and growth dynamics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(rankent_version()));

  std::string ingest_input;
  auto* chk = app.add_subcommand("ingest-check",
                                 "validate a panel CSV and print a summary");
  chk->add_option("input", ingest_input, "panel CSV file")
      ->required()
      ->check(CLI::ExistingFile);

  CommonFitFlags fitf;
  auto* fit = app.add_subcommand("fit", "fit the rank-size model to a slice");
  add_fit_flags(fit, &fitf, true);

  CommonFitFlags bandf;
  auto* band = app.add_subcommand("band", "sampling band around a fit");
  add_fit_flags(band, &bandf, true);

  CommonFitFlags scalef;
  std::vector<std::string> scale_groups;
  auto* scale = app.add_subcommand(
      "scale", "collapse groups onto the common scaled curve");
  scale->add_option("input", scalef.input, "panel CSV file")
      ->required()
      ->check(CLI::ExistingFile);
  scale->add_option("--group", scale_groups,
                    "group to include (repeatable; default: all)");
  scale->add_option("--year", scalef.year,
                    "cross-section year (default: latest per group)");
  scale->add_option("--n-total", scalef.n_total,
                    "external aggregate for the q=1 fits");
  scale->add_flag("--fit-n", scalef.fit_n, "estimate the aggregate per group");
  scale->add_option("--out-dir", scalef.out_dir,
                    "output directory (default: .)");

  rankent_dynamics_options dyn_defaults;
  rankent_dynamics_options_init(&dyn_defaults);
  std::string dyn_input, dyn_group, dyn_out = ".";
  bool dyn_group_given = false, dyn_weighted = dyn_defaults.weighted != 0;
  double dyn_delta_u = dyn_defaults.delta_u;
  double dyn_min_bin_frac = dyn_defaults.min_bin_frac;
  auto* dyn = app.add_subcommand("dynamics",
                                 "growth-rate fit over a group's panel");
  dyn->add_option("input", dyn_input, "panel CSV file")
      ->required()
      ->check(CLI::ExistingFile);
  dyn->add_option("--group", dyn_group, "group to fit (default: every group)")
      ->trigger_on_parse()
      ->each([&dyn_group_given](const std::string&) {
        dyn_group_given = true;
      });
  dyn->add_option("--delta-u", dyn_delta_u, "log-size bin width");
  dyn->add_option("--min-bin-frac", dyn_min_bin_frac,
                  "drop bins below this fraction of the largest");
  dyn->add_flag("--weighted", dyn_weighted, "standard-error bin weighting");
  dyn->add_option("--out-dir", dyn_out, "output directory (default: .)");

  rankent_compare_options cq_defaults;
  rankent_compare_options_init(&cq_defaults);
  std::string cq_input, cq_out = ".";
  long long cq_year = cq_defaults.year;
  double cq_delta_u = cq_defaults.dynamics.delta_u;
  double cq_min_bin_frac = cq_defaults.dynamics.min_bin_frac;
  bool cq_weighted = cq_defaults.dynamics.weighted != 0;
  double cq_agree_q = cq_defaults.agree_q;
  double cq_agree_ll = cq_defaults.agree_log_lambda;
  int cq_head = cq_defaults.exclude_head, cq_tail = cq_defaults.exclude_tail;
  auto* cq = app.add_subcommand(
      "compare-q", "cross-section q against dynamical q, per group");
  cq->add_option("input", cq_input, "panel CSV file")
      ->required()
      ->check(CLI::ExistingFile);
  cq->add_option("--year", cq_year,
                 "cross-section year (default: latest per group)");
  cq->add_option("--delta-u", cq_delta_u, "log-size bin width");
  cq->add_option("--min-bin-frac", cq_min_bin_frac,
                 "drop bins below this fraction of the largest");
  cq->add_flag("--weighted", cq_weighted, "standard-error bin weighting");
  cq->add_option("--agree-q", cq_agree_q, "workflow q agreement tolerance");
  cq->add_option("--agree-log-lambda", cq_agree_ll,
                 "workflow log lambda agreement tolerance");
  cq->add_option("--exclude-head", cq_head, "workflow large-end cap");
  cq->add_option("--exclude-tail", cq_tail, "workflow small-end cap");
  cq->add_option("--out-dir", cq_out, "output directory (default: .)");

  SimFlags simf;
  auto* sim = app.add_subcommand("simulate",
                                 "generate a synthetic growth panel");
  sim->add_option("--units", simf.units, "number of units");
  sim->add_option("--q", simf.q, "growth nonlinearity exponent");
  sim->add_option("--k1", simf.k1, "mean proportional rate");
  sim->add_option("--k1-std", simf.k1_std, "proportional-rate spread");
  sim->add_option("--kq", simf.kq, "mean nonlinear rate");
  sim->add_option("--kq-std", simf.kq_std, "nonlinear-rate spread");
  sim->add_flag("--finite-size-noise", simf.finite_size_noise,
                "sqrt(x)-scaled demographic noise");
  sim->add_flag("--rates-per-unit", simf.rates_per_unit,
                "draw rates once per unit instead of per step");
  sim->add_option("--dt", simf.dt, "step in years; 1/dt must be whole");
  sim->add_option("--steps", simf.steps, "number of steps");
  sim->add_option("--year0", simf.year0, "calendar year of the first snapshot");
  sim->add_option("--ceiling", simf.ceiling, "abort size threshold");
  sim->add_option("--init", simf.init, "fixed | log-uniform | equilibrium")
      ->check(CLI::IsMember({"fixed", "log-uniform", "equilibrium"}));
  sim->add_option("--init-value", simf.init_value, "fixed initial size");
  sim->add_option("--init-lo", simf.init_lo, "log-uniform lower bound");
  sim->add_option("--init-hi", simf.init_hi, "log-uniform upper bound");
  sim->add_option("--init-q", simf.init_q, "equilibrium model q");
  sim->add_option("--init-lambda", simf.init_lambda, "equilibrium model lambda");
  sim->add_option("--init-x0", simf.init_x0, "equilibrium model x0");
  sim->add_option("--init-sigma", simf.init_sigma, "equilibrium model sigma");
  sim->add_option("--seed", simf.seed, "simulation seed");
  sim->add_option("--out-dir", simf.out_dir, "output directory (default: .)");

  CLI11_PARSE(app, argc, argv);

  if (chk->parsed()) return cmd_ingest_check(ingest_input);
  if (fit->parsed()) return cmd_fit_like(fitf, false);
  if (band->parsed()) return cmd_fit_like(bandf, true);
  if (scale->parsed()) return cmd_scale(scalef, scale_groups);
  if (dyn->parsed()) {
    return cmd_dynamics(dyn_input, dyn_group, dyn_group_given, dyn_delta_u,
                        dyn_min_bin_frac, dyn_weighted, dyn_out);
  }
  if (cq->parsed()) {
    return cmd_compare_q(cq_input, cq_year, cq_delta_u, cq_min_bin_frac,
                         cq_weighted, cq_agree_q, cq_agree_ll, cq_head,
                         cq_tail, cq_out);
  }
  if (sim->parsed()) return cmd_simulate(simf);
  return kUsage;
}
