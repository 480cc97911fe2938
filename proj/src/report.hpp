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

#include <string>
#include <vector>

#include <json.hpp>

#include "dynamics.hpp"
#include "estimation.hpp"

namespace rankent::report {

// Column-labeled cell table, the exchange format for plot data.  Cells are
// already-rendered strings so numeric formatting is decided exactly once.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Shortest decimal that round-trips the double; "" for NaN (blank cell).
std::string num(double v);

// RFC-4180-ish CSV: cells containing comma, quote, or newline get quoted.
std::string to_csv(const Table& t);

// JSON documents below sort object keys, so identical values serialize to
// identical bytes.  config is echoed verbatim into a "config" key.
nlohmann::json fit_report_json(const estimation::FitReport& rep,
                               const nlohmann::json& config);
nlohmann::json dynamics_fit_json(const dynamics::DynamicsFit& fit,
                                 const nlohmann::json& config);

// dump(2) with a trailing newline, the one rendering used for every
// emitted document.
std::string render(const nlohmann::json& doc);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace rankent::report
