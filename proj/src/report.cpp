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

#include "report.hpp"

#include <cmath>
#include <fstream>

#include "errors.hpp"

namespace rankent::report {

using nlohmann::json;

std::string num(double v) {
  if (std::isnan(v)) return "";
  return json(v).dump();
}

std::string to_csv(const Table& t) {
  auto cell = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
      if (c == '"') out += '"';
      out += c;
    }
    out += '"';
    return out;
  };
  std::string out;
  for (std::size_t j = 0; j < t.header.size(); ++j) {
    if (j) out += ',';
    out += cell(t.header[j]);
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out += ',';
      out += cell(row[j]);
    }
    out += '\n';
  }
  return out;
}

namespace {

json params_json(const ModelParams& p) {
  json out;
  out["q"] = p.q;
  out["lambda"] = p.lambda;
  out["log_lambda"] = std::log(p.lambda);
  out["x0"] = p.x0;
  out["log_x0"] = std::log(p.x0);
  out["sigma"] = p.sigma;
  out["n_c"] = p.n_c;
  out["n_total"] = p.n_total;
  return out;
}

}  // namespace

json fit_report_json(const estimation::FitReport& rep, const json& config) {
  json out;
  out["method"] = estimation::method_name(rep.method);
  out["outcome"] = estimation::outcome_name(rep.outcome);
  out["converged"] = rep.converged;
  out["params"] = params_json(rep.params);
  out["stderr"] = json::object();
  for (const auto& [k, v] : rep.stderrs) out["stderr"][k] = v;
  out["R"] = rep.correlation;
  out["sse"] = std::isfinite(rep.sse) ? json(rep.sse) : json();
  out["outsiders"] = json::array();
  for (const auto& o : rep.outsiders) {
    json row;
    row["rank"] = o.rank;
    row["size"] = o.size;
    row["end"] = o.head ? "head" : "tail";
    out["outsiders"].push_back(row);
  }
  out["detail"] = rep.detail;
  out["config"] = config;
  return out;
}

json dynamics_fit_json(const dynamics::DynamicsFit& fit, const json& config) {
  json out;
  out["method"] = "binned_q_exponential";
  json params;
  params["k1"] = fit.k1;
  params["kq"] = fit.kq;
  params["q"] = fit.q;
  params["well_defined"] = fit.well_defined;
  out["params"] = params;
  json se;
  se["k1"] = fit.k1_std;
  se["kq"] = fit.kq_std;
  se["q"] = fit.q_std;
  out["stderr"] = se;
  out["R"] = fit.correlation;
  out["sse"] = std::isfinite(fit.sse) ? json(fit.sse) : json();
  out["n_bins"] = fit.n_bins;
  out["config"] = config;
  return out;
}

std::string render(const json& doc) { return doc.dump(2) + "\n"; }

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << content;
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace rankent::report
