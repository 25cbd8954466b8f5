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

#ifndef STYLECOVER_SYNTHETIC_H_
#define STYLECOVER_SYNTHETIC_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "json.hpp"
#include "stylecover/interchange.h"
#include "stylecover/submodular.h"

namespace stylecover {

// Planted-partition dataset: cluster k owns one axis-aligned tile of the
// H x W map (tiles laid out row-major on a ceil(sqrt(K))-column grid), and
// every member channel's difference map for every code is the tile indicator
// plus N(0, noise^2), clipped to [0, 1].
struct PlantedSpec {
  int clusters = 8;
  int per_cluster = 4;
  int codes = 4;
  int height = 16;
  int width = 16;
  double noise = 0.05;
  uint64_t seed = 7;
  std::vector<double> reward_profile;  // per cluster; empty means all 1.0
  double reward_jitter = 0.01;         // relative, uniform in [-j, +j]
  int layers = 1;                      // clusters spread over layers in blocks
  double alpha = 20.0;
  double truncation = 0.7;
  bool with_pairs = false;   // also render (+a, -a) image pairs
  int pair_window = 7;       // pairs are (H + s - 1) x (W + s - 1) for a side-s window
  double pair_amplitude = 60.0;

  void Validate() const;
  nlohmann::json ToJson() const;
};

struct Tile {
  int row0 = 0, row1 = 0, col0 = 0, col1 = 0;  // half-open
};

struct PlantedDataset {
  Manifest manifest;
  std::vector<ChannelSignature> signatures;
  std::vector<float> rewards;
  std::vector<int> truth;      // ground-truth cluster per channel
  std::vector<Tile> supports;  // per cluster
  std::optional<Matrix> pairs;  // dims [V, M, 2, IH, IW] when with_pairs
};

// Fully determined by the spec (seed included). Draw order: map noise from
// stream `seed` (channel, code, pixel order, skipped when noise == 0);
// reward jitter from stream seed ^ kRewardStream (channel order); pair
// base images and pixel noise from stream seed ^ kPairStream.
PlantedDataset GeneratePlanted(const PlantedSpec& spec);

inline constexpr uint64_t kRewardStream = 0x5245574152440000ULL;
inline constexpr uint64_t kPairStream = 0x5041495253000000ULL;

// Writes the SCX dataset (plus pairs.scx when present) and truth.json.
void WritePlanted(const PlantedDataset& data, const PlantedSpec& spec,
                  const std::filesystem::path& dir);

// Three channels, identity similarity, clusters {v1, v2} and {v3}, rewards
// (5, 4, 3).
Instance GenerateThreeChannelExample(double lambda = 25.0);

struct RandomInstanceSpec {
  int size = 12;
  int clusters = 3;
  uint64_t seed = 1;
  double lambda = 25.0;
  double max_reward = 5.0;
  // false: i.i.d. similarities in [0, 1]. true: [0.6, 1] within a cluster and
  // [0, 0.2] across clusters.
  bool block_similarity = false;
  bool normalize_coverage = false;
};

Instance GenerateRandomInstance(const RandomInstanceSpec& spec);

}  // namespace stylecover

#endif  // STYLECOVER_SYNTHETIC_H_
