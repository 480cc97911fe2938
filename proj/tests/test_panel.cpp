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

#include <cstdio>
#include <fstream>
#include <string>

#include <doctest.h>

#include "errors.hpp"
#include "panel.hpp"

using namespace rankent;

namespace {

// Each test writes its fixture under the system temp directory with a
// name unique to this binary run.
std::string write_temp(const std::string& name, const std::string& content) {
  const std::string path = std::string("/tmp/rankent_panel_") + name + ".csv";
  std::ofstream out(path, std::ios::binary);
  out << content;
  out.close();
  return path;
}

}  // namespace

TEST_CASE("three valid rows become three records") {
  const auto path = write_temp("ok3",
                               "unit_id,year,population\n"
                               "a,2000,10\n"
                               "a,2001,12\n"
                               "b,2000,999\n");
  const Dataset ds = ingest(path);
  REQUIRE(ds.panel.size() == 3);
  CHECK(ds.panel[0].unit_id == "a");
  CHECK(ds.panel[0].year == 2000);
  CHECK(ds.panel[0].population == 10);
  CHECK(ds.panel[2].population == 999);
  CHECK(!ds.has_groups());
  CHECK(ds.source_path == path);
  std::remove(path.c_str());
}

TEST_CASE("checksum follows the bytes") {
  const auto p1 = write_temp("sum1", "unit_id,year,population\na,2000,10\n");
  const auto p2 = write_temp("sum2", "unit_id,year,population\na,2000,10\n");
  const auto p3 = write_temp("sum3", "unit_id,year,population\na,2000,11\n");
  CHECK(ingest(p1).checksum == ingest(p2).checksum);
  CHECK(ingest(p1).checksum != ingest(p3).checksum);
  std::remove(p1.c_str());
  std::remove(p2.c_str());
  std::remove(p3.c_str());
}

TEST_CASE("duplicate (unit, year) names both rows") {
  const auto path = write_temp("dup",
                               "unit_id,year,population\n"
                               "a,2000,10\n"
                               "b,2000,20\n"
                               "a,2000,30\n");
  try {
    ingest(path);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    REQUIRE(e.issues().size() == 1);
    CHECK(e.issues()[0].find("row 2") != std::string::npos);
    CHECK(e.issues()[0].find("row 4") != std::string::npos);
    CHECK(e.issues()[0].find("a") != std::string::npos);
  }
  std::remove(path.c_str());
}

TEST_CASE("zero and negative populations are rejected with row numbers") {
  const auto path = write_temp("nonpos",
                               "unit_id,year,population\n"
                               "a,2000,0\n"
                               "b,2000,-5\n"
                               "c,2000,1\n");
  try {
    ingest(path);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    REQUIRE(e.issues().size() == 2);
    CHECK(e.issues()[0].find("row 2") != std::string::npos);
    CHECK(e.issues()[1].find("row 3") != std::string::npos);
  }
  std::remove(path.c_str());
}

TEST_CASE("decimal populations are a parse error with line and column") {
  const auto path = write_temp("dec",
                               "unit_id,year,population\n"
                               "a,2000,10.5\n");
  try {
    ingest(path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("integer") != std::string::npos);
  }
  std::remove(path.c_str());
}

TEST_CASE("missing fields carry line and column") {
  const auto path = write_temp("short",
                               "unit_id,year,population\n"
                               "a,2000,5\n"
                               "b,2001\n");
  try {
    ingest(path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  std::remove(path.c_str());
}

TEST_CASE("wrong header is rejected") {
  const auto path = write_temp("hdr", "id,year,pop\na,2000,5\n");
  CHECK_THROWS_AS(ingest(path), ParseError);
  std::remove(path.c_str());
}

TEST_CASE("missing file is an io error") {
  CHECK_THROWS_AS(ingest("/tmp/rankent_panel_does_not_exist.csv"), IoError);
}

TEST_CASE("group column loads and must be consistent per unit") {
  const auto good = write_temp("grp_ok",
                               "unit_id,year,population,group\n"
                               "a,2000,10,east\n"
                               "a,2001,11,east\n"
                               "b,2000,20,west\n");
  const Dataset ds = ingest(good);
  CHECK(ds.has_groups());
  CHECK(ds.groups.at("a") == "east");
  CHECK(ds.groups.at("b") == "west");
  std::remove(good.c_str());

  const auto bad = write_temp("grp_bad",
                              "unit_id,year,population,group\n"
                              "a,2000,10,east\n"
                              "a,2001,11,west\n");
  CHECK_THROWS_AS(ingest(bad), ValidationError);
  std::remove(bad.c_str());
}

TEST_CASE("validation lists every issue, not just the first") {
  const auto path = write_temp("multi",
                               "unit_id,year,population\n"
                               "a,2000,0\n"
                               "b,2001,-1\n"
                               "c,2002,5\n"
                               "c,2002,6\n");
  try {
    ingest(path);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.issues().size() == 3);
  }
  std::remove(path.c_str());
}

TEST_CASE("panel csv round-trips through ingest") {
  std::vector<PanelRecord> panel = {
      {"u01", 2000, 150, "north"},
      {"u01", 2001, 160, "north"},
      {"u02", 2000, 70, "south"},
  };
  const std::string path = "/tmp/rankent_panel_roundtrip.csv";
  write_panel_csv(panel, path);
  const Dataset ds = ingest(path);
  REQUIRE(ds.panel.size() == panel.size());
  for (std::size_t i = 0; i < panel.size(); ++i) {
    CHECK(ds.panel[i].unit_id == panel[i].unit_id);
    CHECK(ds.panel[i].year == panel[i].year);
    CHECK(ds.panel[i].population == panel[i].population);
    CHECK(ds.panel[i].group == panel[i].group);
  }
  // And the rendered text is reproduced byte for byte.
  CHECK(panel_csv(ds.panel) == panel_csv(panel));
  std::remove(path.c_str());
}

TEST_CASE("slices, years, and groups") {
  const auto path = write_temp("slice",
                               "unit_id,year,population,group\n"
                               "a,2000,10,east\n"
                               "a,2001,11,east\n"
                               "b,2000,30,east\n"
                               "c,2000,7,west\n"
                               "c,2001,8,west\n");
  const Dataset ds = ingest(path);
  CHECK(group_names(ds) == std::vector<std::string>{"east", "west"});
  CHECK(years_for(ds, "east") == std::vector<long long>{2000, 2001});
  CHECK(years_for(ds, "") == std::vector<long long>{2000, 2001});

  const RankedSample east = slice_ranked(ds, "east", 2000);
  REQUIRE(east.n_c() == 2);
  CHECK(east.sizes[0] == 30.0);  // descending
  CHECK(east.sizes[1] == 10.0);
  CHECK(east.ranks[0] == 0.5);

  const RankedSample all = slice_ranked(ds, "", 2001);
  CHECK(all.n_c() == 2);
  CHECK_THROWS_AS(slice_ranked(ds, "west", 1999), DomainError);
  CHECK_THROWS_AS(slice_ranked(ds, "nowhere", 2000), DomainError);

  const auto series = unit_series(ds, "west");
  REQUIRE(series.size() == 1);
  CHECK(series[0].first == "c");
  REQUIRE(series[0].second.size() == 2);
  CHECK(series[0].second[0].first == 2000);
  CHECK(series[0].second[0].second == 7.0);
  std::remove(path.c_str());
}
