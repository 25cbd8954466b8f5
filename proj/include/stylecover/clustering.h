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

#ifndef STYLECOVER_CLUSTERING_H_
#define STYLECOVER_CLUSTERING_H_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "stylecover/signatures.h"
#include "stylecover/types.h"

namespace stylecover {

enum class Linkage { kAverage, kComplete, kSingle };

std::string_view LinkageName(Linkage linkage);
Linkage ParseLinkage(std::string_view name);

// A partition of the ground set into disjoint, nonempty clusters. Cluster ids
// are ordered by smallest member. `ground_set[i]` is the dataset channel index
// of local element i.
struct Clustering {
  std::vector<int> assignment;
  std::vector<std::vector<int>> clusters;
  std::vector<std::string> labels;  // empty, or one per cluster ("" = unlabeled)
  std::vector<int> ground_set;
  std::string linkage = "average";
  double threshold = 0.0;

  int num_clusters() const { return static_cast<int>(clusters.size()); }
  int size() const { return static_cast<int>(assignment.size()); }

  // Builds clusters from a per-element id array and renumbers ids by
  // smallest member. ground_set defaults to the identity.
  static Clustering FromAssignment(std::span<const int> assignment);

  void Validate() const;

  nlohmann::json ToJson() const;
  static Clustering FromJson(const nlohmann::json& json);
};

// Bottom-up merging on a precomputed distance matrix: repeatedly merges the
// pair of clusters with the smallest linkage distance while that distance is
// strictly below `threshold`. Equal distances go to the pair whose smallest
// members are lexicographically smallest.
Clustering Agglomerate(const PairwiseMatrix& distance, Linkage linkage, double threshold);

struct RegionMask {
  std::string name;
  int height = 0;
  int width = 0;
  std::vector<uint8_t> values;  // row-major, 0 or 1

  void Validate() const;
};

RegionMask ReadRegionMask(const std::filesystem::path& file, std::string name);
void WriteRegionMask(const RegionMask& mask, const std::filesystem::path& file);

// Mean over member channels and style codes of the difference maps, scaled to
// sum 1 unless it is all zero. `signatures` is indexed by dataset channel
// index (through cl.ground_set).
std::vector<double> ClusterEnergyMap(const Clustering& cl, int cluster,
                                     std::span<const ChannelSignature> signatures);

// Fraction of the cluster's energy inside the mask; 0 for all-zero clusters.
double RegionMatch(const Clustering& cl, int cluster, const RegionMask& mask,
                   std::span<const ChannelSignature> signatures);

struct RankedCluster {
  int cluster = 0;
  double score = 0.0;
};

// Clusters ranked by RegionMatch (descending, ties by id); first min(top_k, K).
std::vector<RankedCluster> FilterByRegion(const Clustering& cl, const RegionMask& mask,
                                          int top_k,
                                          std::span<const ChannelSignature> signatures);

// Union of per-layer clusterings over disjoint ground sets. Clusters with the
// same nonempty label are merged; unlabeled clusters pass through. `labels`
// overrides each layer's own labels when given (one vector per layer).
Clustering MergeLayerwise(std::span<const Clustering> layers,
                          const std::optional<std::vector<std::vector<std::string>>>& labels =
                              std::nullopt);

// Chance-corrected agreement of two partitions of the same elements.
double AdjustedRandIndex(std::span<const int> a, std::span<const int> b);

}  // namespace stylecover

#endif  // STYLECOVER_CLUSTERING_H_
