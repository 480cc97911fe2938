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

#include "panel.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "errors.hpp"

namespace rankent {
namespace {

struct Field {
  std::string text;
  int column = 0;  // 1-based position of the field's first character
};

std::vector<Field> split_line(const std::string& line) {
  std::vector<Field> out;
  int col = 1;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      out.push_back({line.substr(start, i - start), col});
      col = static_cast<int>(i) + 2;
      start = i + 1;
    }
  }
  return out;
}

long long parse_int_field(const Field& f, int line_no, const char* what) {
  long long value = 0;
  const char* first = f.text.data();
  const char* last = first + f.text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || f.text.empty()) {
    std::string msg(what);
    if (f.text.find('.') != std::string::npos) {
      msg += " must be an integer (decimals are rejected)";
    } else {
      msg += " is not an integer";
    }
    msg += ": '" + f.text + "'";
    throw ParseError(msg, line_no, f.column);
  }
  return value;
}

}  // namespace

std::uint64_t fnv1a64(const void* data, std::size_t n) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = 1469598103934665603ull;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ull;
  }
  return h;
}

Dataset ingest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failure on '" + path + "'");
  const std::string content = buf.str();

  Dataset ds;
  ds.source_path = path;
  ds.checksum = fnv1a64(content.data(), content.size());

  std::istringstream lines(content);
  std::string line;
  int line_no = 0;
  bool with_group = false;
  bool saw_header = false;
  while (std::getline(lines, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<Field> fields = split_line(line);
    if (!saw_header) {
      saw_header = true;
      if (fields.size() == 4 && fields[3].text == "group") {
        with_group = true;
      } else if (fields.size() != 3) {
        throw ParseError(
            "header must be 'unit_id,year,population' with an optional "
            "trailing 'group' column",
            line_no, 1);
      }
      if (fields[0].text != "unit_id" || fields[1].text != "year" ||
          fields[2].text != "population") {
        throw ParseError(
            "header must be 'unit_id,year,population' with an optional "
            "trailing 'group' column",
            line_no, 1);
      }
      continue;
    }
    const std::size_t want = with_group ? 4 : 3;
    if (fields.size() != want) {
      throw ParseError("expected " + std::to_string(want) + " fields, found " +
                           std::to_string(fields.size()),
                       line_no, fields.back().column);
    }
    PanelRecord rec;
    rec.unit_id = fields[0].text;
    if (rec.unit_id.empty()) {
      throw ParseError("unit_id is empty", line_no, fields[0].column);
    }
    rec.year = parse_int_field(fields[1], line_no, "year");
    rec.population = parse_int_field(fields[2], line_no, "population");
    if (with_group) {
      rec.group = fields[3].text;
      if (rec.group.empty()) {
        throw ParseError("group is empty", line_no, fields[3].column);
      }
    }
    ds.panel.push_back(std::move(rec));
  }
  if (!saw_header) throw ParseError("file has no header row", 1, 1);

  // Parse succeeded; now enumerate every semantic problem at once.
  std::vector<std::string> issues;
  std::map<std::pair<std::string, long long>, int> seen;
  for (std::size_t i = 0; i < ds.panel.size(); ++i) {
    const PanelRecord& rec = ds.panel[i];
    const int row = static_cast<int>(i) + 2;  // header is row 1
    if (rec.population <= 0) {
      issues.push_back("row " + std::to_string(row) + ": population " +
                       std::to_string(rec.population) + " for unit '" +
                       rec.unit_id + "' must be positive");
    }
    auto key = std::make_pair(rec.unit_id, rec.year);
    auto [it, inserted] = seen.emplace(key, row);
    if (!inserted) {
      issues.push_back("row " + std::to_string(row) + ": duplicate (unit '" +
                       rec.unit_id + "', year " + std::to_string(rec.year) +
                       "), first seen at row " + std::to_string(it->second));
    }
    if (with_group) {
      auto [git, ginserted] = ds.groups.emplace(rec.unit_id, rec.group);
      if (!ginserted && git->second != rec.group) {
        issues.push_back("row " + std::to_string(row) + ": unit '" +
                         rec.unit_id + "' assigned to group '" + rec.group +
                         "' but earlier to '" + git->second + "'");
      }
    }
  }
  if (!issues.empty()) {
    ds.groups.clear();
    throw ValidationError(issues);
  }
  return ds;
}

std::string panel_csv(const std::vector<PanelRecord>& panel) {
  bool with_group = false;
  for (const PanelRecord& rec : panel) {
    if (!rec.group.empty()) with_group = true;
  }
  std::string out = "unit_id,year,population";
  if (with_group) out += ",group";
  out += '\n';
  for (const PanelRecord& rec : panel) {
    out += rec.unit_id;
    out += ',';
    out += std::to_string(rec.year);
    out += ',';
    out += std::to_string(rec.population);
    if (with_group) {
      out += ',';
      out += rec.group;
    }
    out += '\n';
  }
  return out;
}

void write_panel_csv(const std::vector<PanelRecord>& panel,
                     const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << panel_csv(panel);
  out.flush();
  if (!out) throw IoError("write failure on '" + path + "'");
}

std::vector<std::string> group_names(const Dataset& ds) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const PanelRecord& rec : ds.panel) {
    if (seen.insert(rec.group).second) out.push_back(rec.group);
  }
  return out;
}

std::vector<long long> years_for(const Dataset& ds, const std::string& group) {
  std::set<long long> years;
  for (const PanelRecord& rec : ds.panel) {
    if (group.empty() || rec.group == group) years.insert(rec.year);
  }
  return {years.begin(), years.end()};
}

RankedSample slice_ranked(const Dataset& ds, const std::string& group,
                          long long year) {
  std::vector<double> sizes;
  for (const PanelRecord& rec : ds.panel) {
    if (rec.year != year) continue;
    if (!group.empty() && rec.group != group) continue;
    sizes.push_back(static_cast<double>(rec.population));
  }
  if (sizes.empty()) {
    throw DomainError("no records for group '" + group + "', year " +
                      std::to_string(year));
  }
  std::string label =
      (group.empty() ? std::string("all") : group) + "/" + std::to_string(year);
  return make_ranked_sample(sizes, label);
}

std::vector<std::pair<std::string, std::vector<std::pair<long long, double>>>>
unit_series(const Dataset& ds, const std::string& group) {
  std::vector<std::pair<std::string, std::vector<std::pair<long long, double>>>>
      out;
  std::map<std::string, std::size_t> index;
  for (const PanelRecord& rec : ds.panel) {
    if (!group.empty() && rec.group != group) continue;
    auto [it, inserted] = index.emplace(rec.unit_id, out.size());
    if (inserted) out.push_back({rec.unit_id, {}});
    out[it->second].second.push_back(
        {rec.year, static_cast<double>(rec.population)});
  }
  for (auto& [unit, series] : out) {
    std::sort(series.begin(), series.end());
  }
  return out;
}

}  // namespace rankent
