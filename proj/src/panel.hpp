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
#include <map>
#include <string>
#include <vector>

#include "types.hpp"

namespace rankent {

// One (unit, year) observation.  Populations are counts, so they are kept
// integral; `group` is empty when the file has no group column.
struct PanelRecord {
  std::string unit_id;
  long long year = 0;
  long long population = 0;
  std::string group;
};

struct Dataset {
  std::vector<PanelRecord> panel;
  std::string source_path;
  std::uint64_t checksum = 0;
  // unit -> group, populated when the file carries a group column.  The
  // validator guarantees it covers every unit or is empty.
  std::map<std::string, std::string> groups;

  bool has_groups() const { return !groups.empty(); }
};

// FNV-1a over raw bytes; stable across platforms.
std::uint64_t fnv1a64(const void* data, std::size_t n);

// Reads a CSV panel with header `unit_id,year,population` and an optional
// trailing `group` column.  Throws ParseError (with line/column) on layout
// problems and ValidationError (all issues listed) on semantic ones.
Dataset ingest(const std::string& path);

// Renders `panel` in the layout `ingest` reads, preserving record order.
std::string panel_csv(const std::vector<PanelRecord>& panel);

void write_panel_csv(const std::vector<PanelRecord>& panel,
                     const std::string& path);

// Distinct groups in file order ("" when the dataset has no group column).
std::vector<std::string> group_names(const Dataset& ds);

// Years present for a group (empty group = whole dataset), ascending.
std::vector<long long> years_for(const Dataset& ds, const std::string& group);

// Populations of a (group, year) slice as a ranked sample.  Empty group
// selects every unit.  Throws DomainError when the slice is empty.
RankedSample slice_ranked(const Dataset& ds, const std::string& group,
                          long long year);

// Per-unit time series (year, population) for a group, each ascending in
// year.  Unit order follows first appearance in the panel.
std::vector<std::pair<std::string, std::vector<std::pair<long long, double>>>>
unit_series(const Dataset& ds, const std::string& group);

}  // namespace rankent

