// Copyright 2026 The Authors.
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

#include "stylecover/pipeline.h"

#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "test_util.h"

namespace stylecover {
namespace {

using ::stylecover::testing::ReadBytes;
using ::stylecover::testing::ReadText;
using ::stylecover::testing::ScopedDir;

int Cli(std::vector<std::string> args) { return RunCli(args); }

class PipelineTest : public ::testing::Test {
 protected:
  void SetUp() override {
    ASSERT_EQ(Cli({"synth", "--out", dir(), "--codes", "4", "--noise", "0.05"}), 0);
  }
  std::string dir() const { return root_.path().string(); }
  std::filesystem::path path(const std::string& f) const { return root_.path() / f; }

  ScopedDir root_{"pipeline"};
};

TEST_F(PipelineTest, FullFlowRecoversPlantedClusters) {
  ASSERT_EQ(Cli({"distances", dir()}), 0);
  ASSERT_EQ(Cli({"cluster", dir()}), 0);
  const auto clusters = ReadJsonFile(path(kClustersFile));
  EXPECT_EQ(clusters.at("K"), 8);
  ASSERT_EQ(Cli({"select", dir(), "-n", "8"}), 0);
  const auto sel = ReadJsonFile(path(kSelectionJson));
  EXPECT_EQ(sel.at("distinct_clusters"), 8);
  EXPECT_EQ(sel.at("order").size(), 8u);
  EXPECT_FALSE(sel.contains("wall_time_ms"));
  const std::string csv = ReadText(path(kSelectionCsv));
  EXPECT_EQ(csv.rfind("step,channel,layer,cluster,gain\n", 0), 0u);
  for (const char* f : {"run_synth.json", "run_distances.json", "run_cluster.json",
                        "run_select.json"}) {
    EXPECT_TRUE(std::filesystem::exists(path(f))) << f;
  }
}

TEST_F(PipelineTest, StagesAreIdempotent) {
  ASSERT_EQ(Cli({"distances", dir()}), 0);
  ASSERT_EQ(Cli({"cluster", dir()}), 0);
  ASSERT_EQ(Cli({"select", dir(), "-n", "5"}), 0);
  std::vector<std::vector<uint8_t>> first;
  const std::vector<std::string> files = {kDistancesFile, kSimilarityFile, kClustersFile,
                                          kSelectionJson, kSelectionCsv, "run_select.json"};
  for (const auto& f : files) first.push_back(ReadBytes(path(f)));
  ASSERT_EQ(Cli({"distances", dir()}), 0);
  ASSERT_EQ(Cli({"cluster", dir()}), 0);
  ASSERT_EQ(Cli({"select", dir(), "-n", "5"}), 0);
  for (size_t i = 0; i < files.size(); ++i) EXPECT_EQ(ReadBytes(path(files[i])), first[i]) << files[i];
}

TEST_F(PipelineTest, SolversAgreeAndSweepIsWritten) {
  ASSERT_EQ(Cli({"distances", dir()}), 0);
  ASSERT_EQ(Cli({"cluster", dir()}), 0);
  ASSERT_EQ(Cli({"select", dir(), "-n", "3", "--solver", "greedy"}), 0);
  const auto greedy = ReadJsonFile(path(kSelectionJson)).at("order");
  ASSERT_EQ(Cli({"select", dir(), "-n", "3", "--solver", "brute", "--record-time"}), 0);
  const auto brute = ReadJsonFile(path(kSelectionJson));
  EXPECT_TRUE(brute.contains("wall_time_ms"));
  EXPECT_EQ(brute.at("order").size(), greedy.size());
  ASSERT_EQ(Cli({"sweep-lambda", dir(), "-n", "8", "--lambdas", "0,25"}), 0);
  EXPECT_EQ(ReadText(path(kSweepCsv)).rfind("lambda,distinct_clusters\n", 0), 0u);
  ASSERT_EQ(Cli({"check", dir(), "--trials", "200"}), 0);
  EXPECT_TRUE(ReadJsonFile(path("check.json")).at("ok").get<bool>());
  ASSERT_EQ(Cli({"report", dir()}), 0);
  EXPECT_NE(ReadText(path("report.md")).find("## Selection"), std::string::npos);
}

TEST_F(PipelineTest, LayerFilterRestrictsGroundSet) {
  ScopedDir layered("layered");
  const std::string d = layered.path().string();
  ASSERT_EQ(Cli({"synth", "--out", d, "--codes", "2", "--layers", "2"}), 0);
  ASSERT_EQ(Cli({"distances", d}), 0);
  ASSERT_EQ(Cli({"cluster", d, "--per-layer"}), 0);
  ASSERT_EQ(Cli({"select", d, "-n", "4", "--layers", "1"}), 0);
  for (const auto& row : ReadJsonFile(layered.path() / kSelectionJson).at("order")) {
    EXPECT_EQ(row.at("layer"), 1);
  }
  EXPECT_EQ(Cli({"select", d, "-n", "4", "--layers", "7"}), 2);
}

TEST_F(PipelineTest, ImageRouteProducesSignaturesAndRewards) {
  ScopedDir images("images");
  const std::string d = images.path().string();
  ASSERT_EQ(Cli({"synth", "--out", d, "--codes", "2", "--size", "24x24", "--pairs"}), 0);
  ASSERT_EQ(Cli({"signatures", d, "--window", "uniform"}), 0);
  ASSERT_EQ(Cli({"rewards", d}), 0);
  const Dataset ds = ReadDataset(images.path());
  EXPECT_EQ(ds.manifest.map_height, 24);
  ASSERT_TRUE(ds.rewards.has_value());
  for (float r : *ds.rewards) EXPECT_GT(r, 0.0f);
  ASSERT_EQ(Cli({"distances", d}), 0);
  ASSERT_EQ(Cli({"cluster", d, "--threshold", "0.5"}), 0);
  EXPECT_EQ(ReadJsonFile(images.path() / kClustersFile).at("K"), 8);
}

TEST_F(PipelineTest, RegionFilterRanksMatchingClusterFirst) {
  RegionMask mask{"corner", 16, 16, std::vector<uint8_t>(256, 0)};
  for (int y = 0; y < 5; ++y) {
    for (int x = 0; x < 5; ++x) mask.values[y * 16 + x] = 1;
  }
  WriteRegionMask(mask, path("corner.scx"));
  ASSERT_EQ(Cli({"distances", dir()}), 0);
  ASSERT_EQ(Cli({"cluster", dir()}), 0);
  ASSERT_EQ(Cli({"filter-region", dir(), "--mask-file", path("corner.scx").string(), "--top-k",
                 "2"}),
            0);
  const auto out = ReadJsonFile(path("region_filter.json"));
  ASSERT_EQ(out.at("clusters").size(), 2u);
  EXPECT_EQ(out.at("clusters")[0].at("cluster"), 0);
  EXPECT_GT(out.at("clusters")[0].at("score").get<double>(), 0.5);
}

TEST_F(PipelineTest, ErrorsMapToExitCodes) {
  EXPECT_EQ(Cli({"select", dir()}), 2);  // no clusters.json yet
  EXPECT_EQ(Cli({"cluster", dir()}), 2);  // no distances yet
  EXPECT_EQ(Cli({"frobnicate"}), 2);
  EXPECT_EQ(Cli({"select", dir(), "--solver", "magic"}), 2);
  EXPECT_EQ(Cli({"distances", (root_.path() / "missing").string()}), 2);
  ASSERT_EQ(Cli({"distances", dir()}), 0);
  ASSERT_EQ(Cli({"cluster", dir()}), 0);
  EXPECT_EQ(Cli({"select", dir(), "-n", "33"}), 2);
  std::filesystem::resize_file(path(kSimilarityFile), 20);
  EXPECT_EQ(Cli({"select", dir(), "-n", "3"}), 2);
}

}  // namespace
}  // namespace stylecover
