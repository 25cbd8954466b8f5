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

#ifndef STYLECOVER_SUBMODULAR_H_
#define STYLECOVER_SUBMODULAR_H_

// Coverage + diversity objective over a ground set of channels V:
//
//   coverage(P)  = scale * sum_{j in P} sum_{i in V} sim(i, j)
//   diversity(P) = sum_k ln(1 + sum_{v in C_k and P} reward(v))
//   F(P)         = coverage(P) + lambda * diversity(P)
//
// scale is 1, or 1/|V| with normalize_coverage. The self pair (i == j) is part
// of the coverage sum. F is monotone and submodular whenever every column sum
// of sim and every reward is non-negative, which Instance::Validate enforces.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "stylecover/clustering.h"
#include "stylecover/signatures.h"

namespace stylecover {

// Absolute tolerance for objective comparisons.
inline constexpr double kObjectiveTolerance = 1e-9;
// Gains within this of the step maximum count as tied; the smallest index wins.
inline constexpr double kTieTolerance = 1e-12;
inline constexpr uint64_t kBruteForceLimit = 1'000'000;

struct Instance {
  std::shared_ptr<const PairwiseMatrix> similarity;
  std::vector<int> cluster_of;  // cluster id per element, ids in [0, num_clusters)
  int num_clusters = 0;
  std::vector<double> rewards;
  double lambda = 25.0;
  bool normalize_coverage = false;

  int size() const { return similarity ? similarity->size() : 0; }
  double coverage_scale() const { return normalize_coverage ? 1.0 / size() : 1.0; }

  // Throws ValidationError on any broken invariant (negative reward, negative
  // lambda, size mismatch, negative column sum, malformed matrix).
  void Validate() const;

  static Instance FromClustering(std::shared_ptr<const PairwiseMatrix> similarity,
                                 const Clustering& clustering, std::vector<double> rewards,
                                 double lambda, bool normalize_coverage = false);
};

double Coverage(std::span<const int> selected, const Instance& inst);
double Diversity(std::span<const int> selected, const Instance& inst);
double Objective(std::span<const int> selected, const Instance& inst);

// Incremental state for marginal gains: column sums of the similarity matrix
// and the per-cluster sums of selected rewards.
class GainState {
 public:
  explicit GainState(const Instance& inst);

  // F(P + v) - F(P) in O(1). Throws if v is already selected.
  double MarginalGain(int v) const;
  void Add(int v);

  bool selected(int v) const { return selected_[v]; }
  std::span<const int> selection() const { return order_; }
  std::span<const double> column_sums() const { return column_sums_; }

 private:
  const Instance& inst_;
  std::vector<double> column_sums_;
  std::vector<double> cluster_reward_;
  std::vector<bool> selected_;
  std::vector<int> order_;
};

struct SelectionResult {
  std::string solver;
  int n = 0;
  double lambda = 0.0;
  bool normalize_coverage = false;
  std::vector<int> order;
  std::vector<double> gains;
  std::vector<double> objective_trace;
  std::optional<double> wall_time_ms;

  double objective() const { return objective_trace.empty() ? 0.0 : objective_trace.back(); }
};

// Each step takes the smallest index whose gain is within kTieTolerance of
// the step maximum. Always returns exactly min(n, |V|) items.
SelectionResult Greedy(const Instance& inst, int n);

// Accelerated greedy with stale upper bounds in a priority queue. Produces the
// same order, gains and trace as Greedy.
SelectionResult LazyGreedy(const Instance& inst, int n);

// Exact maximizer over all subsets of size min(n, |V|) (a monotone objective
// attains its maximum there). Ties go to the lexicographically smallest index
// set; order is ascending. Throws when C(|V|, n) exceeds kBruteForceLimit.
SelectionResult BruteForce(const Instance& inst, int n);

struct PropertyReport {
  int trials = 0;
  int monotonicity_violations = 0;
  int submodularity_violations = 0;
  // min over trials of F(P + v) - F(P)
  double min_monotone_slack = 0.0;
  // min over trials of [F(R + v) - F(R)] - [F(P + v) - F(P)]
  double min_submodular_slack = 0.0;

  bool ok() const { return monotonicity_violations == 0 && submodularity_violations == 0; }
};

// Samples random chains R subset P subset V and v outside P, and checks
// monotonicity and diminishing returns at kObjectiveTolerance.
PropertyReport CheckProperties(const Instance& inst, int trials, uint64_t seed);

nlohmann::json ToJson(const PropertyReport& report);

}  // namespace stylecover

#endif  // STYLECOVER_SUBMODULAR_H_
