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

#include "stylecover/clustering.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "stylecover/interchange.h"

namespace stylecover {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double Choose2(double n) { return n * (n - 1) / 2.0; }

int DatasetIndex(const Clustering& cl, int local) {
  return cl.ground_set.empty() ? local : cl.ground_set[local];
}

void CheckClusterId(const Clustering& cl, int cluster) {
  if (cluster < 0 || cluster >= cl.num_clusters()) {
    throw ValidationError("invalid cluster id " + std::to_string(cluster));
  }
}

// Working state for the merge loop. Slot s always holds the cluster whose
// smallest member is s, so ordering pairs by slot orders them by smallest
// member.
class MergeState {
 public:
  MergeState(const PairwiseMatrix& distance, Linkage linkage)
      : n_(distance.size()),
        linkage_(linkage),
        d_(distance.data().begin(), distance.data().end()),
        active_(n_, true),
        sizes_(n_, 1),
        nn_(n_, -1),
        nn_dist_(n_, kInf) {
    for (int i = 0; i < n_; ++i) RecomputeNeighbor(i);
  }

  // Smallest-distance active pair (i < j), ties by smallest i then j.
  std::optional<std::pair<int, int>> BestPair(double* dist) const {
    int best = -1;
    for (int i = 0; i < n_; ++i) {
      if (!active_[i] || nn_[i] < 0) continue;
      if (best < 0 || nn_dist_[i] < nn_dist_[best]) best = i;
    }
    if (best < 0) return std::nullopt;
    *dist = nn_dist_[best];
    return std::make_pair(best, nn_[best]);
  }

  void Merge(int i, int j) {
    for (int k = 0; k < n_; ++k) {
      if (!active_[k] || k == i || k == j) continue;
      const double updated = Updated(at(i, k), at(j, k), sizes_[i], sizes_[j]);
      at(i, k) = updated;
      at(k, i) = updated;
    }
    sizes_[i] += sizes_[j];
    active_[j] = false;
    nn_[j] = -1;

    RecomputeNeighbor(i);
    for (int k = 0; k < n_; ++k) {
      if (!active_[k] || k == i) continue;
      if (nn_[k] == i || nn_[k] == j) {
        RecomputeNeighbor(k);
      } else if (k < i) {
        const double dki = at(k, i);
        if (dki < nn_dist_[k] || (dki == nn_dist_[k] && i < nn_[k])) {
          nn_[k] = i;
          nn_dist_[k] = dki;
        }
      }
    }
  }

 private:
  double& at(int i, int j) { return d_[static_cast<size_t>(i) * n_ + j]; }

  double Updated(double d_ik, double d_jk, int size_i, int size_j) const {
    switch (linkage_) {
      case Linkage::kSingle:
        return std::min(d_ik, d_jk);
      case Linkage::kComplete:
        return std::max(d_ik, d_jk);
      case Linkage::kAverage:
        break;
    }
    return (size_i * d_ik + size_j * d_jk) / static_cast<double>(size_i + size_j);
  }

  // Nearest active slot with a larger index.
  void RecomputeNeighbor(int i) {
    nn_[i] = -1;
    nn_dist_[i] = kInf;
    for (int j = i + 1; j < n_; ++j) {
      if (!active_[j]) continue;
      const double v = at(i, j);
      if (nn_[i] < 0 || v < nn_dist_[i]) {
        nn_[i] = j;
        nn_dist_[i] = v;
      }
    }
  }

  int n_;
  Linkage linkage_;
  std::vector<double> d_;
  std::vector<bool> active_;
  std::vector<int> sizes_;
  std::vector<int> nn_;
  std::vector<double> nn_dist_;
};

}  // namespace

std::string_view LinkageName(Linkage linkage) {
  switch (linkage) {
    case Linkage::kAverage:
      return "average";
    case Linkage::kComplete:
      return "complete";
    case Linkage::kSingle:
      return "single";
  }
  return "average";
}

Linkage ParseLinkage(std::string_view name) {
  if (name == "average") return Linkage::kAverage;
  if (name == "complete") return Linkage::kComplete;
  if (name == "single") return Linkage::kSingle;
  throw ValidationError("unknown linkage '" + std::string(name) + "'");
}

Clustering Clustering::FromAssignment(std::span<const int> assignment) {
  Clustering cl;
  std::map<int, int> renumber;  // raw id -> canonical id, in first-seen order
  cl.assignment.resize(assignment.size());
  for (size_t i = 0; i < assignment.size(); ++i) {
    auto [it, inserted] = renumber.try_emplace(assignment[i], static_cast<int>(renumber.size()));
    if (inserted) cl.clusters.emplace_back();
    cl.assignment[i] = it->second;
    cl.clusters[it->second].push_back(static_cast<int>(i));
  }
  cl.ground_set.resize(assignment.size());
  std::iota(cl.ground_set.begin(), cl.ground_set.end(), 0);
  return cl;
}

void Clustering::Validate() const {
  const int n = size();
  if (n < 1) throw ValidationError("clustering has an empty ground set");
  if (clusters.empty()) throw ValidationError("clustering needs K >= 1");
  if (!ground_set.empty() && ground_set.size() != assignment.size()) {
    throw ValidationError("clustering ground_set length differs from assignment length");
  }
  if (!labels.empty() && labels.size() != clusters.size()) {
    throw ValidationError("clustering labels must be one per cluster");
  }
  std::vector<int> seen(n, 0);
  for (int k = 0; k < num_clusters(); ++k) {
    if (clusters[k].empty()) throw ValidationError("cluster " + std::to_string(k) + " is empty");
    for (int v : clusters[k]) {
      if (v < 0 || v >= n) throw ValidationError("cluster member out of range");
      if (seen[v]++) throw ValidationError("clusters are not disjoint");
      if (assignment[v] != k) throw ValidationError("assignment disagrees with cluster lists");
    }
  }
  for (int v = 0; v < n; ++v) {
    if (!seen[v]) throw ValidationError("clusters do not cover the ground set");
  }
  std::set<int> ground(ground_set.begin(), ground_set.end());
  if (ground.size() != ground_set.size()) throw ValidationError("ground_set has duplicates");
}

nlohmann::json Clustering::ToJson() const {
  nlohmann::json j;
  j["linkage"] = linkage;
  j["threshold"] = threshold;
  j["K"] = num_clusters();
  j["assignment"] = assignment;
  j["channels"] = ground_set;
  if (!labels.empty()) j["labels"] = labels;
  return j;
}

Clustering Clustering::FromJson(const nlohmann::json& json) {
  Clustering cl;
  try {
    // Stored ids are kept as written; Validate() rejects gaps and overlaps.
    cl.assignment = json.at("assignment").get<std::vector<int>>();
    int k_max = -1;
    for (int a : cl.assignment) {
      if (a < 0) throw ValidationError("clusters.json: negative cluster id");
      k_max = std::max(k_max, a);
    }
    cl.clusters.assign(k_max + 1, {});
    for (int i = 0; i < cl.size(); ++i) cl.clusters[cl.assignment[i]].push_back(i);
    cl.linkage = json.value("linkage", std::string("average"));
    cl.threshold = json.value("threshold", 0.0);
    if (json.contains("channels")) cl.ground_set = json.at("channels").get<std::vector<int>>();
    if (json.contains("labels")) cl.labels = json.at("labels").get<std::vector<std::string>>();
    if (json.contains("K") && json.at("K").get<int>() != cl.num_clusters()) {
      throw ValidationError("clusters.json: K disagrees with assignment");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("clusters.json: ") + e.what());
  }
  cl.Validate();
  return cl;
}

Clustering Agglomerate(const PairwiseMatrix& distance, Linkage linkage, double threshold) {
  if (distance.kind() != MatrixKind::kDistance) {
    throw ValidationError("agglomerate needs a distance matrix");
  }
  distance.Validate();
  if (!(threshold > 0) || !std::isfinite(threshold)) {
    throw ValidationError("threshold must be positive");
  }
  const int n = distance.size();
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);

  MergeState state(distance, linkage);
  double best = 0.0;
  while (auto pair = state.BestPair(&best)) {
    if (!(best < threshold)) break;
    state.Merge(pair->first, pair->second);
    parent[pair->second] = pair->first;
  }

  std::vector<int> root(n);
  for (int v = 0; v < n; ++v) {
    int r = v;
    while (parent[r] != r) r = parent[r];
    root[v] = r;
  }
  Clustering cl = Clustering::FromAssignment(root);
  cl.linkage = std::string(LinkageName(linkage));
  cl.threshold = threshold;
  return cl;
}

void RegionMask::Validate() const {
  if (height < 1 || width < 1 || values.size() != static_cast<size_t>(height) * width) {
    throw ValidationError("region mask '" + name + "' has invalid dimensions");
  }
  bool any = false;
  for (uint8_t v : values) {
    if (v > 1) throw ValidationError("region mask '" + name + "' has values outside {0,1}");
    any |= v == 1;
  }
  if (!any) throw ValidationError("region mask '" + name + "' has no active pixel");
}

RegionMask ReadRegionMask(const std::filesystem::path& file, std::string name) {
  const Matrix m = ReadMatrix(file);
  if (m.dims.size() != 2) throw ValidationError("region mask file must have dims [H,W]");
  RegionMask mask{std::move(name), static_cast<int>(m.dims[0]), static_cast<int>(m.dims[1]), {}};
  mask.values.reserve(m.values.size());
  for (float v : m.values) {
    if (v != 0.0f && v != 1.0f) {
      throw ValidationError("region mask '" + mask.name + "' has values outside {0,1}");
    }
    mask.values.push_back(v == 1.0f ? 1 : 0);
  }
  mask.Validate();
  return mask;
}

void WriteRegionMask(const RegionMask& mask, const std::filesystem::path& file) {
  mask.Validate();
  const uint32_t dims[] = {static_cast<uint32_t>(mask.height), static_cast<uint32_t>(mask.width)};
  std::vector<float> values(mask.values.begin(), mask.values.end());
  WriteMatrix(dims, values, file);
}

std::vector<double> ClusterEnergyMap(const Clustering& cl, int cluster,
                                     std::span<const ChannelSignature> signatures) {
  CheckClusterId(cl, cluster);
  const auto& members = cl.clusters[cluster];
  const int first = DatasetIndex(cl, members.front());
  if (first < 0 || static_cast<size_t>(first) >= signatures.size()) {
    throw ValidationError("cluster member has no signature");
  }
  const int map_size = signatures[first].map_size;
  std::vector<double> energy(map_size, 0.0);
  size_t maps = 0;
  for (int local : members) {
    const int idx = DatasetIndex(cl, local);
    if (idx < 0 || static_cast<size_t>(idx) >= signatures.size()) {
      throw ValidationError("cluster member has no signature");
    }
    const auto& s = signatures[idx];
    if (s.map_size != map_size) throw ValidationError("signature shape mismatch");
    for (int m = 0; m < s.num_codes; ++m) {
      const auto map = s.Map(m);
      for (int p = 0; p < map_size; ++p) energy[p] += map[p];
      ++maps;
    }
  }
  for (double& e : energy) e /= static_cast<double>(maps);
  const double total = std::accumulate(energy.begin(), energy.end(), 0.0);
  if (total > 0) {
    for (double& e : energy) e /= total;
  }
  return energy;
}

double RegionMatch(const Clustering& cl, int cluster, const RegionMask& mask,
                   std::span<const ChannelSignature> signatures) {
  mask.Validate();
  const auto energy = ClusterEnergyMap(cl, cluster, signatures);
  if (energy.size() != mask.values.size()) {
    throw ValidationError("dimension mismatch between mask '" + mask.name + "' and maps");
  }
  double inside = 0.0;
  for (size_t p = 0; p < energy.size(); ++p) {
    if (mask.values[p]) inside += energy[p];
  }
  return std::clamp(inside, 0.0, 1.0);
}

std::vector<RankedCluster> FilterByRegion(const Clustering& cl, const RegionMask& mask,
                                          int top_k,
                                          std::span<const ChannelSignature> signatures) {
  if (top_k < 1) throw ValidationError("top_k must be >= 1");
  std::vector<RankedCluster> ranked;
  ranked.reserve(cl.num_clusters());
  for (int k = 0; k < cl.num_clusters(); ++k) {
    ranked.push_back({k, RegionMatch(cl, k, mask, signatures)});
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const RankedCluster& a, const RankedCluster& b) {
    return a.score > b.score;
  });
  ranked.resize(std::min<size_t>(ranked.size(), top_k));
  return ranked;
}

Clustering MergeLayerwise(std::span<const Clustering> layers,
                          const std::optional<std::vector<std::vector<std::string>>>& labels) {
  if (layers.empty()) throw ValidationError("merge_layerwise needs at least one clustering");
  if (labels && labels->size() != layers.size()) {
    throw ValidationError("merge_layerwise: one label list per layer required");
  }

  std::vector<int> ground;
  std::vector<int> raw_assignment;
  std::vector<std::string> raw_labels;  // indexed by merged raw id
  std::map<std::string, int> label_ids;
  std::set<int> seen;

  for (size_t l = 0; l < layers.size(); ++l) {
    const Clustering& cl = layers[l];
    cl.Validate();
    const auto& layer_labels = labels ? (*labels)[l] : cl.labels;
    if (!layer_labels.empty() && layer_labels.size() != cl.clusters.size()) {
      throw ValidationError("merge_layerwise: label count differs from cluster count");
    }
    std::vector<int> local_to_merged(cl.num_clusters());
    for (int k = 0; k < cl.num_clusters(); ++k) {
      const std::string label = layer_labels.empty() ? "" : layer_labels[k];
      if (!label.empty()) {
        auto [it, inserted] = label_ids.try_emplace(label, static_cast<int>(raw_labels.size()));
        if (inserted) raw_labels.push_back(label);
        local_to_merged[k] = it->second;
      } else {
        local_to_merged[k] = static_cast<int>(raw_labels.size());
        raw_labels.emplace_back();
      }
    }
    for (int v = 0; v < cl.size(); ++v) {
      const int g = DatasetIndex(cl, v);
      if (!seen.insert(g).second) {
        throw ValidationError("merge_layerwise: overlapping ground sets at channel " +
                              std::to_string(g));
      }
      ground.push_back(g);
      raw_assignment.push_back(local_to_merged[cl.assignment[v]]);
    }
  }

  Clustering merged = Clustering::FromAssignment(raw_assignment);
  merged.ground_set = std::move(ground);
  merged.linkage = layers.front().linkage;
  merged.threshold = layers.front().threshold;
  bool any_label = false;
  std::vector<std::string> canonical_labels(merged.num_clusters());
  for (int k = 0; k < merged.num_clusters(); ++k) {
    canonical_labels[k] = raw_labels[raw_assignment[merged.clusters[k].front()]];
    any_label |= !canonical_labels[k].empty();
  }
  if (any_label) merged.labels = std::move(canonical_labels);
  return merged;
}

double AdjustedRandIndex(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw ValidationError("ARI needs partitions of the same elements");
  const double n = static_cast<double>(a.size());
  if (a.size() < 2) return 1.0;
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> rows;
  std::map<int, double> cols;
  for (size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1;
    rows[a[i]] += 1;
    cols[b[i]] += 1;
  }
  double index = 0, sum_rows = 0, sum_cols = 0;
  for (const auto& [key, c] : joint) index += Choose2(c);
  for (const auto& [key, c] : rows) sum_rows += Choose2(c);
  for (const auto& [key, c] : cols) sum_cols += Choose2(c);
  const double expected = sum_rows * sum_cols / Choose2(n);
  const double max_index = (sum_rows + sum_cols) / 2.0;
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

}  // namespace stylecover
