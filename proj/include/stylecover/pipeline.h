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

#ifndef STYLECOVER_PIPELINE_H_
#define STYLECOVER_PIPELINE_H_

// End-to-end stages over an SCX dataset directory. Each stage reads the
// artifacts of earlier stages and writes its own, plus run_<stage>.json with
// the full configuration. Outputs carry no timestamps, so re-running a stage
// on unchanged inputs reproduces its files byte for byte.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "stylecover/clustering.h"
#include "stylecover/metrics.h"
#include "stylecover/signatures.h"
#include "stylecover/submodular.h"
#include "stylecover/synthetic.h"

namespace stylecover {

inline constexpr char kVersion[] = "0.1.0";
inline constexpr const char kSelectionJson[] = "selection.json";
inline constexpr const char kSelectionCsv[] = "selection.csv";
inline constexpr const char kSweepCsv[] = "sweep.csv";

// Dataset indices kept by a layer filter (empty filter keeps all). Throws if
// nothing survives.
std::vector<int> FilterLayers(const Manifest& manifest, const std::vector<int>& layers);

void SynthStage(const PlantedSpec& spec, const std::filesystem::path& out);

// Difference maps from pairs.scx; rewrites signatures.scx and the manifest's
// map dimensions.
void SignaturesStage(const std::filesystem::path& dir, const WindowSpec& window, int threads);

void DistancesStage(const std::filesystem::path& dir, SignatureMode mode, int threads,
                    bool csv_mirror);

struct ClusterOptions {
  Linkage linkage = Linkage::kAverage;
  double threshold = 0.7;
  std::vector<int> layers;
  bool per_layer = false;
  // Label each cluster with the best-matching manifest region mask when its
  // match is at least label_min; with per_layer, equal labels merge.
  bool label_by_masks = false;
  double label_min = 0.5;
};
Clustering ClusterStage(const std::filesystem::path& dir, const ClusterOptions& options);

struct RewardsOptions {
  std::string proxy = "pyramid";
  std::optional<std::filesystem::path> import_file;  // .scx or .csv, dims [V]
  int threads = 1;
};
void RewardsStage(const std::filesystem::path& dir, const RewardsOptions& options);

struct SelectOptions {
  int n = 25;
  double lambda = 25.0;
  bool normalize = false;
  std::string solver = "lazy";  // greedy | lazy | brute
  std::vector<int> layers;
  bool record_time = false;
};

struct Selection {
  SelectionResult result;
  std::vector<int> dataset_index;  // per selected item
  std::vector<int> cluster;        // clusters.json id per selected item
  int distinct_clusters = 0;
};

Selection SelectStage(const std::filesystem::path& dir, const SelectOptions& options);
void WriteSelection(const Selection& selection, const Manifest& manifest,
                    const std::filesystem::path& out);
nlohmann::json ToJson(const Selection& selection, const Manifest& manifest);

// (lambda, distinct clusters among the top n) for each lambda.
std::vector<std::pair<double, int>> SweepStage(const std::filesystem::path& dir,
                                               const std::vector<double>& lambdas,
                                               const SelectOptions& base,
                                               const std::filesystem::path& out);

struct RegionFilterOptions {
  std::string mask_name;
  std::optional<std::filesystem::path> mask_file;
  int top_k = 5;
};
std::vector<RankedCluster> FilterRegionStage(const std::filesystem::path& dir,
                                             const RegionFilterOptions& options,
                                             const std::filesystem::path& out);

struct CheckOptions {
  int trials = 10000;
  uint64_t seed = 1;
  double lambda = 25.0;
  bool normalize = false;
  std::vector<int> layers;
};
PropertyReport CheckStage(const std::filesystem::path& dir, const CheckOptions& options,
                          const std::filesystem::path& out);

std::string ReportStage(const std::filesystem::path& dir, const std::filesystem::path& out);

// Entry point for the `stylecover` tool. Returns 0 on success, 2 on
// validation failure (bad flags, missing or invalid artifacts, violated
// properties), 1 on internal error.
int RunCli(const std::vector<std::string>& args);

}  // namespace stylecover

#endif  // STYLECOVER_PIPELINE_H_
