/* Copyright 2026 The sddkit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <fstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "sddkit/analytics.hpp"
#include "sddkit/registry.hpp"

namespace sddkit {
namespace {

const DatasetRegistry& shipped() {
  static const DatasetRegistry reg = load_registry(SDDKIT_DEFAULT_REGISTRY);
  return reg;
}

std::vector<std::string> labels(const std::vector<VideoGroup>& groups) {
  std::vector<std::string> out;
  for (const auto& g : groups) out.push_back(g.label);
  return out;
}

TEST(VideoRanges, ParsesListsAndRanges) {
  EXPECT_EQ(parse_video_ranges("6,10-14"), (std::vector<int>{6, 10, 11, 12, 13, 14}));
  EXPECT_EQ(parse_video_ranges(" 0-2 , 5 "), (std::vector<int>{0, 1, 2, 5}));
  EXPECT_EQ(parse_video_ranges("3"), (std::vector<int>{3}));
  EXPECT_THROW(parse_video_ranges("4-2"), ConfigError);
  EXPECT_THROW(parse_video_ranges("a"), ConfigError);
  EXPECT_THROW(parse_video_ranges("1,,2"), ConfigError);
}

TEST(Registry, IndVideoSixIsTest) {
  EXPECT_EQ(shipped().dataset("ind").split_of({"", 6}), Split::kTest);
}

TEST(Registry, CoupaTimeOverlapIsFull) {
  EXPECT_EQ(shipped().scene("sdd", "Coupa").time_overlap, OverlapLevel::kFull);
  EXPECT_EQ(shipped().scene("sdd", "coupa").location_overlap, OverlapLevel::kPartial);
}

TEST(Registry, NexusSimultaneousGroups) {
  const auto& nexus = shipped().scene("sdd", "Nexus");
  EXPECT_EQ(labels(nexus.simultaneous_groups),
            (std::vector<std::string>{"0-2", "3-5", "6-8", "9-11"}));
  EXPECT_EQ(nexus.simultaneous_groups[3].videos, (std::vector<int>{9, 10, 11}));
}

TEST(Registry, FrameRates) {
  EXPECT_EQ(shipped().dataset("sdd").frame_rate, 30.0);
  EXPECT_EQ(shipped().dataset("ind").frame_rate, 25.0);
}

TEST(Registry, IndSplitsAndIntersections) {
  const auto& ind = shipped().dataset("ind");
  const std::vector<int> train{0, 1, 2, 3, 4, 7, 8, 9, 10, 11, 12, 13, 18, 19, 20, 21, 22, 23, 24, 25, 30};
  const std::vector<int> val{5, 14, 15, 26, 27, 31};
  const std::vector<int> test{6, 16, 17, 28, 29, 32};
  for (int v : train) EXPECT_EQ(ind.split_of({"", v}), Split::kTrain) << v;
  for (int v : val) EXPECT_EQ(ind.split_of({"", v}), Split::kValidation) << v;
  for (int v : test) EXPECT_EQ(ind.split_of({"", v}), Split::kTest) << v;
  EXPECT_EQ(ind.splits.size(), 33u);
  EXPECT_EQ(ind.intersection_of(17), "7-17");
  EXPECT_EQ(ind.intersection_of(30), "30-32");
  EXPECT_FALSE(ind.intersection_of(33).has_value());
}

TEST(Registry, InconsistentCuratedGroupsAreDiagnosticsNotErrors) {
  const auto& msgs = shipped().diagnostics.messages;
  auto has = [&](const std::string& needle) {
    return std::any_of(msgs.begin(), msgs.end(),
                       [&](const std::string& m) { return m.find(needle) != std::string::npos; });
  };
  EXPECT_TRUE(has("sdd/coupa"));
  EXPECT_TRUE(has("sdd/gates"));
}

nlohmann::json minimal() {
  return nlohmann::json::parse(R"({
    "version": 1,
    "datasets": {
      "ind": {"frame_rate": 25, "recordings": "0-5",
              "splits": {"train": "0-2", "test": "3-5"}},
      "sdd": {"frame_rate": 30, "scenes": {
        "coupa": {"videos": "0-3", "location_overlap": "partial", "time_overlap": "full",
                  "simultaneous_groups": ["0,1", "2,3"]}}}
    }
  })");
}

TEST(Registry, OverlappingSplitAssignmentIsAnError) {
  auto j = minimal();
  j["datasets"]["ind"]["splits"]["validation"] = "2";
  EXPECT_THROW(parse_registry(j), ConfigError);
}

TEST(Registry, SplitOfUnknownVideoIsAnError) {
  auto j = minimal();
  j["datasets"]["ind"]["splits"]["test"] = "3-9";
  EXPECT_THROW(parse_registry(j), ConfigError);
}

TEST(Registry, SchemaViolations) {
  auto j = minimal();
  j["version"] = 2;
  EXPECT_THROW(parse_registry(j), ConfigError);
  j = minimal();
  j.erase("version");
  EXPECT_THROW(parse_registry(j), ConfigError);
  j = minimal();
  j["datasets"]["sdd"]["scenes"]["coupa"]["time_overlap"] = "sometimes";
  EXPECT_THROW(parse_registry(j), ConfigError);
  j = minimal();
  j["datasets"]["sdd"]["frame_rate"] = -1;
  EXPECT_THROW(parse_registry(j), ConfigError);
}

TEST(Registry, DisjointGroupsProduceNoDiagnostics) {
  EXPECT_TRUE(parse_registry(minimal()).diagnostics.empty());
}

TEST(Registry, UserSplitFileMerges) {
  auto reg = parse_registry(minimal());
  const auto dir = testing::temp_dir("split_file");
  const auto path = dir / "split.json";
  std::ofstream(path) << R"({"train": ["coupa/0-1"], "test": ["coupa/2,3"]})";
  merge_split_file(reg, "sdd", path);
  EXPECT_EQ(reg.dataset("sdd").split_of({"Coupa", 1}), Split::kTrain);
  EXPECT_EQ(reg.dataset("sdd").split_of({"coupa", 3}), Split::kTest);
  std::ofstream(path) << R"({"validation": ["coupa/1"]})";
  EXPECT_THROW(merge_split_file(reg, "sdd", path), ConfigError);
}

TEST(OverlapReport, MatchesCuratedTableVerbatim) {
  struct Row {
    const char* scene;
    OverlapLevel location;
    OverlapLevel time;
    std::vector<std::string> groups;
  };
  using L = OverlapLevel;
  const std::vector<Row> expected{
      {"Bookstore", L::kPartial, L::kPartial, {"1-6"}},
      {"Coupa", L::kPartial, L::kFull, {"1-4"}},
      {"DeathCircle", L::kFull, L::kNone, {}},
      {"Gates", L::kPartial, L::kPartial, {"0-2", "4-7", "5,6"}},
      {"Hyang", L::kPartial, L::kPartial, {"6,10-14", "7-9", "2,3"}},
      {"Little", L::kPartial, L::kPartial, {"1-3"}},
      {"Nexus", L::kPartial, L::kPartial, {"0-2", "3-5", "6-8", "9-11"}},
      {"Quad", L::kPartial, L::kFull, {"0-3"}},
  };
  const auto rows = overlap_report(shipped(), "sdd");
  ASSERT_EQ(rows.size(), expected.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].scene, expected[i].scene);
    EXPECT_EQ(rows[i].location, expected[i].location) << rows[i].scene;
    EXPECT_EQ(rows[i].time, expected[i].time) << rows[i].scene;
    EXPECT_EQ(rows[i].groups, expected[i].groups) << rows[i].scene;
  }
}

}  // namespace
}  // namespace sddkit
