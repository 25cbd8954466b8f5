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

// Hand-derived values for each public operation.

#include <cmath>
#include <memory>
#include <vector>

#include "gtest/gtest.h"
#include "stylecover/clustering.h"
#include "stylecover/interchange.h"
#include "stylecover/metrics.h"
#include "stylecover/signatures.h"
#include "stylecover/submodular.h"
#include "stylecover/synthetic.h"
#include "test_util.h"

namespace stylecover {
namespace {

using ::stylecover::testing::ScopedDir;

ChannelSignature Sig(int channel, int codes, std::vector<float> values) {
  ChannelSignature s;
  s.channel = {0, channel};
  s.num_codes = codes;
  s.map_size = static_cast<int>(values.size()) / codes;
  s.values = std::move(values);
  return s;
}

Instance InstanceWith(std::shared_ptr<PairwiseMatrix> sim, std::vector<int> clusters,
                      std::vector<double> rewards, double lambda) {
  Instance inst;
  inst.similarity = std::move(sim);
  inst.num_clusters = 0;
  for (int k : clusters) inst.num_clusters = std::max(inst.num_clusters, k + 1);
  inst.cluster_of = std::move(clusters);
  inst.rewards = std::move(rewards);
  inst.lambda = lambda;
  inst.Validate();
  return inst;
}

TEST(ReferenceValuesTest, SingleValueDatasetRoundTrips) {
  ScopedDir dir("single");
  Manifest m;
  m.num_channels = 1;
  m.num_codes = 1;
  m.map_height = m.map_width = 1;
  m.channels = {{0, 0}};
  const std::vector<ChannelSignature> sigs = {Sig(0, 1, {0.5f})};
  WriteDataset(m, sigs, std::nullopt, dir.path());
  const Matrix raw = ReadMatrix(dir.path() / kSignaturesFile);
  EXPECT_EQ(raw.values, (std::vector<float>{0.5f}));
  EXPECT_EQ(ReadDataset(dir.path()).signatures[0].values[0], 0.5f);
}

TEST(ReferenceValuesTest, SmallMatrixRoundTrips) {
  const std::vector<uint32_t> dims = {2, 2};
  const std::vector<float> values = {1, 0, 0, 1};
  const Matrix m = DecodeMatrix(EncodeMatrix(dims, values));
  EXPECT_EQ(m.values, values);
  auto bytes = EncodeMatrix(dims, values);
  bytes.resize(bytes.size() - 4);
  EXPECT_THROW(DecodeMatrix(bytes), ValidationError);
}

TEST(ReferenceValuesTest, DifferenceMapOfBlackVersusWhite) {
  const DifferenceMap d =
      ComputeDifferenceMap(Image(12, 12, 0.0), Image(12, 12, 255.0), WindowSpec::Gaussian());
  const double ssim = 6.5025 / 65031.5025;
  for (double v : d.values) EXPECT_NEAR(v, (1.0 - ssim) / 2.0, 1e-9);
  EXPECT_NEAR(d.values[0], 0.49995, 1e-6);
}

TEST(ReferenceValuesTest, RewardMeanAndFootprint) {
  const PyramidEmbedder embedder;
  std::vector<ImagePair> same = {{Image(8, 8, 10.0), Image(8, 8, 10.0)},
                                 {Image(8, 8, 99.0), Image(8, 8, 99.0)}};
  EXPECT_EQ(ChannelReward(same, embedder), 0.0);

  // Larger perturbed area moves the embedding further.
  auto render = [](int side, double delta) {
    Image img(16, 16, 128.0);
    for (int y = 0; y < side; ++y) {
      for (int x = 0; x < side; ++x) img.at(y, x) += delta;
    }
    return img;
  };
  const std::vector<ImagePair> small = {{render(3, 60), render(3, -60)}};
  const std::vector<ImagePair> large = {{render(10, 60), render(10, -60)}};
  EXPECT_GT(ChannelReward(large, embedder), ChannelReward(small, embedder));
}

TEST(ReferenceValuesTest, CosineDistances) {
  const std::vector<float> u = {1, 1}, v = {1, 0}, w = {0, 1};
  EXPECT_EQ(CosineDistance(u, u), 0.0);
  EXPECT_NEAR(CosineDistance(v, w), 1.0, 0.0);
  EXPECT_NEAR(CosineDistance(u, v), 1.0 - 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(CosineDistance(u, v), 0.29289, 1e-5);
}

TEST(ReferenceValuesTest, ChannelDistanceAveragesCodes) {
  // Code 0: cosine distance 0; code 1: orthogonal -> 1.
  const auto a = Sig(0, 2, {1, 0, 1, 0});
  const auto b = Sig(1, 2, {1, 0, 0, 1});
  EXPECT_DOUBLE_EQ(ChannelDistance(a, b), 0.5);
  EXPECT_EQ(ChannelDistance(a, a), 0.0);
  const auto left = Sig(2, 1, {1, 1, 0, 0});
  const auto right = Sig(3, 1, {0, 0, 1, 1});
  EXPECT_EQ(ChannelDistance(left, right), 1.0);
  EXPECT_EQ(ChannelSimilarity(left, right), 0.0);
}

TEST(ReferenceValuesTest, IdenticalSignaturesGiveDegenerateMatrices) {
  const std::vector<ChannelSignature> sigs = {Sig(0, 1, {0.2f, 0.7f}), Sig(1, 1, {0.2f, 0.7f})};
  const auto m = BuildMatrices(sigs);
  EXPECT_NEAR(m.distance(0, 1), 0.0, 1e-15);
  EXPECT_NEAR(m.similarity(0, 1), 1.0, 1e-15);
}

TEST(ReferenceValuesTest, NoiselessPlantedDistances) {
  PlantedSpec spec;
  spec.clusters = 2;
  spec.per_cluster = 2;
  spec.noise = 0.0;
  const auto d = GeneratePlanted(spec);
  EXPECT_EQ(ChannelDistance(d.signatures[0], d.signatures[1]), 0.0);
  EXPECT_EQ(ChannelDistance(d.signatures[0], d.signatures[2]), 1.0);
}

TEST(ReferenceValuesTest, ThresholdExtremes) {
  PairwiseMatrix d(4, MatrixKind::kDistance);
  d.Set(0, 1, 0.1);
  d.Set(2, 3, 0.1);
  d.Set(0, 2, 0.9);
  d.Set(0, 3, 0.9);
  d.Set(1, 2, 0.9);
  d.Set(1, 3, 0.9);
  EXPECT_EQ(Agglomerate(d, Linkage::kAverage, 0.05).num_clusters(), 4);
  EXPECT_EQ(Agglomerate(d, Linkage::kAverage, 1.0).num_clusters(), 1);
  EXPECT_EQ(Agglomerate(d, Linkage::kAverage, 0.7).assignment, (std::vector<int>{0, 0, 1, 1}));
}

TEST(ReferenceValuesTest, EnergyMapsAndRegionMatches) {
  const std::vector<ChannelSignature> sigs = {Sig(0, 1, {1, 0, 0, 0}), Sig(1, 1, {0, 0, 1, 0}),
                                              Sig(2, 1, {0, 0, 0, 0}), Sig(3, 1, {2, 2, 0, 0})};
  const Clustering cl = Clustering::FromAssignment(std::vector<int>{0, 0, 1, 2});
  EXPECT_EQ(ClusterEnergyMap(cl, 0, sigs), (std::vector<double>{0.5, 0, 0.5, 0}));
  EXPECT_EQ(ClusterEnergyMap(cl, 1, sigs), (std::vector<double>{0, 0, 0, 0}));
  EXPECT_EQ(ClusterEnergyMap(cl, 2, sigs), (std::vector<double>{0.5, 0.5, 0, 0}));
  EXPECT_THROW(ClusterEnergyMap(cl, 3, sigs), ValidationError);

  const RegionMask all{"all", 2, 2, {1, 1, 1, 1}};
  const RegionMask top{"top", 2, 2, {1, 1, 0, 0}};
  const RegionMask bottom{"bottom", 2, 2, {0, 0, 1, 1}};
  EXPECT_EQ(RegionMatch(cl, 0, all, sigs), 1.0);
  EXPECT_EQ(RegionMatch(cl, 1, all, sigs), 0.0);
  EXPECT_EQ(RegionMatch(cl, 2, top, sigs), 1.0);
  EXPECT_EQ(RegionMatch(cl, 2, bottom, sigs), 0.0);
  EXPECT_DOUBLE_EQ(RegionMatch(cl, 0, top, sigs) + RegionMatch(cl, 0, bottom, sigs), 1.0);

  const auto full = FilterByRegion(cl, all, 10, sigs);
  ASSERT_EQ(full.size(), 3u);
  EXPECT_EQ(full[0].cluster, 0);
  EXPECT_EQ(full[1].cluster, 2);
  EXPECT_EQ(FilterByRegion(cl, top, 1, sigs)[0].cluster, 2);
}

TEST(ReferenceValuesTest, UniformTieKeepsIdOrder) {
  const std::vector<ChannelSignature> sigs = {Sig(0, 1, {1, 1}), Sig(1, 1, {1, 1}),
                                              Sig(2, 1, {1, 1})};
  const Clustering cl = Clustering::FromAssignment(std::vector<int>{0, 1, 2});
  const RegionMask left{"left", 1, 2, {1, 0}};
  const auto ranked = FilterByRegion(cl, left, 3, sigs);
  EXPECT_EQ(ranked[0].cluster, 0);
  EXPECT_EQ(ranked[1].cluster, 1);
  EXPECT_EQ(ranked[2].cluster, 2);
}

TEST(ReferenceValuesTest, MergeLayerwiseCases) {
  Clustering one = Clustering::FromAssignment(std::vector<int>{0, 1, 1});
  const std::vector<Clustering> single = {one};
  EXPECT_EQ(MergeLayerwise(single).assignment, one.assignment);

  Clustering a = Clustering::FromAssignment(std::vector<int>{0, 1});
  a.labels = {"hair", ""};
  Clustering b = Clustering::FromAssignment(std::vector<int>{0, 1});
  b.ground_set = {2, 3};
  b.labels = {"", "hair"};
  const std::vector<Clustering> labeled = {a, b};
  EXPECT_EQ(MergeLayerwise(labeled).num_clusters(), 3);

  a.labels.clear();
  b.labels.clear();
  const std::vector<Clustering> plain = {a, b};
  EXPECT_EQ(MergeLayerwise(plain).num_clusters(), 4);
}

TEST(ReferenceValuesTest, CoverageValues) {
  auto ones = std::make_shared<PairwiseMatrix>(3, MatrixKind::kSimilarity);
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) ones->Set(i, j, 1.0);
  }
  const Instance all_ones = InstanceWith(ones, {0, 0, 0}, {1, 1, 1}, 25);
  EXPECT_EQ(Coverage({}, all_ones), 0.0);
  EXPECT_EQ(Coverage(std::vector<int>{0}, all_ones), 3.0);

  auto sim = std::make_shared<PairwiseMatrix>(3, MatrixKind::kSimilarity);
  sim->Set(0, 1, 0.5);
  sim->Set(0, 2, 0.2);
  sim->Set(1, 2, 0.4);
  Instance inst = InstanceWith(sim, {0, 0, 0}, {1, 1, 1}, 25);
  EXPECT_NEAR(Coverage(std::vector<int>{1}, inst), 1.9, 1e-15);
  inst.normalize_coverage = true;
  EXPECT_NEAR(Coverage(std::vector<int>{1}, inst), 1.9 / 3.0, 1e-15);
}

TEST(ReferenceValuesTest, DiversityAndObjectiveValues) {
  auto sim = std::make_shared<PairwiseMatrix>(3, MatrixKind::kSimilarity);
  const Instance inst = InstanceWith(sim, {0, 0, 1}, {2, 6, 1}, 0.0);
  EXPECT_EQ(Diversity({}, inst), 0.0);
  EXPECT_NEAR(Diversity(std::vector<int>{0, 1}, inst), std::log(9.0), 1e-15);
  EXPECT_NEAR(Diversity(std::vector<int>{0, 1}, inst), 2.19722, 1e-5);
  EXPECT_EQ(Objective(std::vector<int>{0, 2}, inst), Coverage(std::vector<int>{0, 2}, inst));

  const Instance example = GenerateThreeChannelExample(25.0);
  EXPECT_NEAR(Objective(std::vector<int>{0, 2}, example), 81.452, 1e-3);
  EXPECT_NEAR(Objective(std::vector<int>{0, 1}, example), 59.56, 1e-2);
  EXPECT_NEAR(Objective(std::vector<int>{1, 2}, example), 76.89, 1e-2);
}

TEST(ReferenceValuesTest, FirstPickGainAndStepTwo) {
  const Instance example = GenerateThreeChannelExample(25.0);
  GainState state(example);
  EXPECT_NEAR(state.MarginalGain(2), 1.0 + 25.0 * std::log(4.0), 1e-12);
  state.Add(0);
  EXPECT_NEAR(state.MarginalGain(1) - 1.0, 12.771, 1e-3);
  EXPECT_NEAR(state.MarginalGain(2) - 1.0, 34.657, 1e-3);
}

TEST(ReferenceValuesTest, ModularCaseSortsByColumnSum) {
  auto sim = std::make_shared<PairwiseMatrix>(4, MatrixKind::kSimilarity);
  sim->Set(0, 1, 0.1);
  sim->Set(1, 2, 0.8);
  sim->Set(2, 3, 0.3);
  sim->Set(0, 3, 0.05);
  // Column sums: 1.15, 1.9, 2.1, 1.35.
  const Instance inst = InstanceWith(sim, {0, 0, 0, 0}, {9, 9, 9, 9}, 0.0);
  EXPECT_EQ(Greedy(inst, 3).order, (std::vector<int>{2, 1, 3}));
  std::vector<int> opt = BruteForce(inst, 3).order;
  EXPECT_EQ(opt, (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(BruteForce(inst, 4).order, (std::vector<int>{0, 1, 2, 3}));
}

TEST(ReferenceValuesTest, SingletonGroundSet) {
  auto sim = std::make_shared<PairwiseMatrix>(1, MatrixKind::kSimilarity);
  const Instance inst = InstanceWith(sim, {0}, {1}, 25.0);
  EXPECT_EQ(LazyGreedy(inst, 1).order, (std::vector<int>{0}));
  EXPECT_EQ(Greedy(inst, 1).order, (std::vector<int>{0}));
}

}  // namespace
}  // namespace stylecover
