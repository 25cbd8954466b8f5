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

#ifndef STYLECOVER_INTERCHANGE_H_
#define STYLECOVER_INTERCHANGE_H_

// The SCX dataset directory shared by every producer and consumer:
//
//   manifest.json     Manifest (JSON, unknown keys ignored)
//   signatures.scx    dims [V, M, H*W], difference maps in [0, 1]
//   rewards.scx       dims [V], optional, values >= 0
//   pairs.scx         dims [V, M, 2, IH, IW], optional grayscale (+a, -a) renders
//   distances.scx     dims [V, V], optional cache
//   similarity.scx    dims [V, V], optional cache
//   clusters.json     optional
//   masks/*.scx       dims [H, W], values in {0, 1}
//
// A matrix file is the 4-byte magic "SCX1", a little-endian uint32 rank, rank
// little-endian uint32 dims, then the row-major payload as little-endian
// IEEE-754 binary32.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "stylecover/types.h"

namespace stylecover {

inline constexpr char kMatrixMagic[4] = {'S', 'C', 'X', '1'};
inline constexpr uint32_t kMaxRank = 8;
inline constexpr int kFormatVersion = 1;
inline constexpr size_t kCsvMaxValues = 10000;

inline constexpr const char kManifestFile[] = "manifest.json";
inline constexpr const char kSignaturesFile[] = "signatures.scx";
inline constexpr const char kRewardsFile[] = "rewards.scx";
inline constexpr const char kPairsFile[] = "pairs.scx";
inline constexpr const char kDistancesFile[] = "distances.scx";
inline constexpr const char kSimilarityFile[] = "similarity.scx";
inline constexpr const char kClustersFile[] = "clusters.json";

struct Matrix {
  std::vector<uint32_t> dims;
  std::vector<float> values;

  size_t ElementCount() const;
};

// Encoding rejects non-finite values and dims whose product disagrees with
// the value count. A zero extent is only valid as the rank-1 shape [0].
std::vector<uint8_t> EncodeMatrix(std::span<const uint32_t> dims,
                                  std::span<const float> values);
Matrix DecodeMatrix(std::span<const uint8_t> bytes);

std::filesystem::path WriteMatrix(std::span<const uint32_t> dims,
                                  std::span<const float> values,
                                  const std::filesystem::path& file);
Matrix ReadMatrix(const std::filesystem::path& file);

// Debug mirror: first line "dims,d0,d1,...", then one row per line (last
// dimension per row), values printed with 9 significant digits so binary32
// round-trips exactly. Limited to kCsvMaxValues values.
void WriteMatrixCsv(const Matrix& matrix, const std::filesystem::path& file);
Matrix ReadMatrixCsv(const std::filesystem::path& file);

struct RegionMaskEntry {
  std::string name;
  std::string file;  // relative to the dataset directory

  friend bool operator==(const RegionMaskEntry&, const RegionMaskEntry&) = default;
};

struct Manifest {
  int format_version = kFormatVersion;
  int num_channels = 0;
  int num_codes = 0;
  int map_height = 0;
  int map_width = 0;
  std::vector<ChannelRef> channels;
  double alpha = 20.0;
  double truncation = 0.7;
  std::string provenance;
  std::vector<RegionMaskEntry> region_masks;
  std::vector<int> excluded_layers;

  int map_size() const { return map_height * map_width; }

  // Throws ValidationError naming the violated invariant.
  void Validate() const;

  nlohmann::json ToJson() const;
  static Manifest FromJson(const nlohmann::json& json);

  friend bool operator==(const Manifest&, const Manifest&) = default;
};

struct Dataset {
  Manifest manifest;
  std::vector<ChannelSignature> signatures;
  std::optional<std::vector<float>> rewards;
};

std::filesystem::path WriteDataset(const Manifest& manifest,
                                   std::span<const ChannelSignature> signatures,
                                   const std::optional<std::vector<float>>& rewards,
                                   const std::filesystem::path& dir);
Dataset ReadDataset(const std::filesystem::path& dir);

void WriteManifest(const Manifest& manifest, const std::filesystem::path& dir);
Manifest ReadManifest(const std::filesystem::path& dir);

void WriteSignatures(const Manifest& manifest,
                     std::span<const ChannelSignature> signatures,
                     const std::filesystem::path& dir);
std::vector<ChannelSignature> ReadSignatures(const Manifest& manifest,
                                             const std::filesystem::path& dir);

void WriteRewards(const Manifest& manifest, std::span<const float> rewards,
                  const std::filesystem::path& dir);
// Empty optional when rewards.scx is absent.
std::optional<std::vector<float>> ReadRewards(const Manifest& manifest,
                                              const std::filesystem::path& dir);

void WriteJsonFile(const nlohmann::json& json, const std::filesystem::path& file);
nlohmann::json ReadJsonFile(const std::filesystem::path& file);

}  // namespace stylecover

#endif  // STYLECOVER_INTERCHANGE_H_
