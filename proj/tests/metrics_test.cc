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

#include "stylecover/metrics.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "stylecover/simd/kernels.h"
#include "oracles.h"
#include "stylecover/types.h"

namespace stylecover {
namespace {

using ::stylecover::testing::NaiveSsim;

Image RandomImage(std::mt19937_64& rng, int h, int w) {
  std::uniform_real_distribution<double> px(0.0, 255.0);
  Image img(h, w);
  for (double& v : img.pixels) v = px(rng);
  return img;
}

TEST(WindowSpecTest, WeightsAreNormalizedAndSymmetric) {
  for (const WindowSpec& spec : {WindowSpec::Gaussian(), WindowSpec::Uniform(7)}) {
    const auto w = spec.Weights();
    ASSERT_EQ(static_cast<int>(w.size()), spec.size);
    double total = 0;
    for (double v : w) total += v;
    EXPECT_NEAR(total, 1.0, 1e-15);
    for (int i = 0; i < spec.size; ++i) EXPECT_DOUBLE_EQ(w[i], w[spec.size - 1 - i]);
  }
  const auto g = WindowSpec::Gaussian(11, 1.5).Weights();
  EXPECT_NEAR(g[6] / g[5], std::exp(-1.0 / (2 * 1.5 * 1.5)), 1e-15);
  EXPECT_DOUBLE_EQ(WindowSpec::Gaussian().C1(), 6.5025);
  EXPECT_DOUBLE_EQ(WindowSpec::Gaussian().C2(), 58.5225);
}

TEST(SsimTest, IdenticalImagesGiveOne) {
  std::mt19937_64 rng(1);
  const Image a = RandomImage(rng, 24, 20);
  const SsimMap m = ComputeSsim(a, a, WindowSpec::Gaussian());
  EXPECT_EQ(m.height, 14);
  EXPECT_EQ(m.width, 10);
  for (double v : m.values) EXPECT_NEAR(v, 1.0, 1e-6);
  const DifferenceMap d = ComputeDifferenceMap(a, a, WindowSpec::Gaussian());
  for (double v : d.values) EXPECT_NEAR(v, 0.0, 1e-6);
}

TEST(SsimTest, BlackVersusWhiteConstant) {
  const Image black(16, 16, 0.0);
  const Image white(16, 16, 255.0);
  const double c1 = WindowSpec::Gaussian().C1();
  const double expected = c1 / (255.0 * 255.0 + c1);
  EXPECT_NEAR(expected, 9.999e-5, 1e-7);
  for (const WindowSpec& spec : {WindowSpec::Gaussian(), WindowSpec::Uniform(7)}) {
    for (double v : ComputeSsim(black, white, spec).values) EXPECT_NEAR(v, expected, 1e-7);
  }
}

TEST(SsimTest, MatchesNaiveReference) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const Image a = RandomImage(rng, 32, 32);
    const Image b = RandomImage(rng, 32, 32);
    for (const WindowSpec& spec : {WindowSpec::Gaussian(), WindowSpec::Uniform(7)}) {
      const auto fast = ComputeSsim(a, b, spec).values;
      const auto naive = NaiveSsim(a, b, spec);
      ASSERT_EQ(fast.size(), naive.size());
      for (size_t i = 0; i < fast.size(); ++i) ASSERT_NEAR(fast[i], naive[i], 1e-6);
    }
  }
}

TEST(SsimTest, BackendsAgree) {
  if (!simd::BackendAvailable(simd::Backend::kAvx2)) GTEST_SKIP() << "AVX2 not available";
  std::mt19937_64 rng(3);
  const Image a = RandomImage(rng, 40, 33);
  const Image b = RandomImage(rng, 40, 33);
  const simd::Backend saved = simd::ActiveBackend();
  simd::SetBackend(simd::Backend::kScalar);
  const auto s = ComputeSsim(a, b, WindowSpec::Gaussian()).values;
  simd::SetBackend(simd::Backend::kAvx2);
  const auto v = ComputeSsim(a, b, WindowSpec::Gaussian()).values;
  simd::SetBackend(saved);
  EXPECT_EQ(s, v);
}

TEST(SsimTest, IsSymmetricAndBounded) {
  std::mt19937_64 rng(4);
  const Image a = RandomImage(rng, 16, 16);
  const Image b = RandomImage(rng, 16, 16);
  const auto ab = ComputeSsim(a, b, WindowSpec::Uniform(5)).values;
  const auto ba = ComputeSsim(b, a, WindowSpec::Uniform(5)).values;
  ASSERT_EQ(ab.size(), ba.size());
  for (size_t i = 0; i < ab.size(); ++i) {
    EXPECT_NEAR(ab[i], ba[i], 1e-12);
    EXPECT_GE(ab[i], -1.0);
    EXPECT_LE(ab[i], 1.0);
  }
  for (double d : ComputeDifferenceMap(a, b, WindowSpec::Uniform(5)).values) {
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, 1.0);
  }
}

TEST(SsimTest, RejectsBadInput) {
  const Image a(8, 8), b(8, 9), big(12, 12);
  EXPECT_THROW(ComputeSsim(a, b, WindowSpec::Uniform(3)), ValidationError);
  EXPECT_THROW(ComputeSsim(a, a, WindowSpec::Gaussian()), ValidationError);
  Image bad(12, 12);
  bad.pixels[5] = 300.0;
  EXPECT_THROW(ComputeSsim(bad, big, WindowSpec::Gaussian()), ValidationError);
}

TEST(ImageTest, RgbIsChannelMean) {
  const std::vector<double> rgb = {0, 30, 60, 255, 255, 255};
  const Image img = Image::FromInterleavedRgb(1, 2, rgb);
  EXPECT_DOUBLE_EQ(img.at(0, 0), 30.0);
  EXPECT_DOUBLE_EQ(img.at(0, 1), 255.0);
}

TEST(PyramidEmbedderTest, MatchesHandComputedLevels) {
  // 8x8 image whose value is its column index; every level stays a ramp.
  Image img(8, 8);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) img.at(y, x) = x;
  }
  const PyramidEmbedder embedder(4);
  const auto e = embedder.Embed(img);
  ASSERT_EQ(e.size(), 64u + 16u + 4u + 1u);
  // Level 0: columns 0..7, norm sqrt(8 * 140).
  EXPECT_NEAR(e[7], 7.0 / std::sqrt(8.0 * 140.0), 1e-15);
  // Level 1: columns 0.5, 2.5, 4.5, 6.5 over 4 rows.
  const double n1 = std::sqrt(4.0 * (0.25 + 6.25 + 20.25 + 42.25));
  EXPECT_NEAR(e[64 + 3], 6.5 / n1, 1e-15);
  // Level 2: columns 1.5, 5.5 over 2 rows.
  EXPECT_NEAR(e[80 + 1], 5.5 / std::sqrt(2.0 * (2.25 + 30.25)), 1e-15);
  // Level 3: single value normalizes to 1.
  EXPECT_NEAR(e[84], 1.0, 1e-15);
}

TEST(PyramidEmbedderTest, FloorsOddSidesAndRejectsSmallImages) {
  const PyramidEmbedder embedder(4);
  EXPECT_FALSE(embedder.Supports(7, 64));
  EXPECT_TRUE(embedder.Supports(8, 8));
  EXPECT_EQ(embedder.Embed(Image(9, 11, 10.0)).size(), 99u + 20u + 4u + 1u);
  EXPECT_THROW(embedder.Embed(Image(4, 4, 1.0)), ValidationError);
}

TEST(RewardTest, ScoreIsDistanceBetweenEmbeddings) {
  std::mt19937_64 rng(5);
  const PyramidEmbedder embedder;
  const Image a = RandomImage(rng, 16, 16);
  const Image b = RandomImage(rng, 16, 16);
  EXPECT_EQ(RewardScore(a, a, embedder), 0.0);
  EXPECT_DOUBLE_EQ(RewardScore(a, b, embedder), RewardScore(b, a, embedder));
  const auto ea = embedder.Embed(a);
  const auto eb = embedder.Embed(b);
  double sum = 0;
  for (size_t i = 0; i < ea.size(); ++i) sum += (ea[i] - eb[i]) * (ea[i] - eb[i]);
  EXPECT_NEAR(RewardScore(a, b, embedder), std::sqrt(sum), 1e-12);
}

TEST(RewardTest, ChannelRewardIsOrderInvariantMean) {
  std::mt19937_64 rng(6);
  const PyramidEmbedder embedder;
  std::vector<ImagePair> pairs;
  for (int i = 0; i < 5; ++i) pairs.push_back({RandomImage(rng, 8, 8), RandomImage(rng, 8, 8)});
  const double forward = ChannelReward(pairs, embedder);
  double mean = 0;
  for (const auto& p : pairs) mean += RewardScore(p.plus, p.minus, embedder);
  EXPECT_NEAR(forward, mean / 5.0, 1e-12);
  std::reverse(pairs.begin(), pairs.end());
  EXPECT_EQ(ChannelReward(pairs, embedder), forward);
  EXPECT_THROW(ChannelReward({}, embedder), ValidationError);
}

}  // namespace
}  // namespace stylecover
