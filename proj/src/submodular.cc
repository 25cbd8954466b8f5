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

#include "stylecover/submodular.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

#include "stylecover/rng.h"

namespace stylecover {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Allowance for rounding in stale lazy bounds (gains shrink mathematically,
// but a recomputed log difference may exceed its earlier value by an ulp).
constexpr double kStaleBoundSlack = 1e-9;

void CheckSelection(std::span<const int> selected, const Instance& inst) {
  const int n = inst.size();
  std::vector<bool> seen(n, false);
  for (int v : selected) {
    if (v < 0 || v >= n) throw ValidationError("channel index " + std::to_string(v) + " out of range");
    if (seen[v]) throw ValidationError("channel " + std::to_string(v) + " listed twice");
    seen[v] = true;
  }
}

double ColumnSum(const PairwiseMatrix& sim, int j) {
  double sum = 0.0;
  for (double x : sim.Row(j)) sum += x;  // symmetric: row j == column j
  return sum;
}

std::vector<double> ColumnSums(const PairwiseMatrix& sim) {
  std::vector<double> sums(sim.size());
  for (int j = 0; j < sim.size(); ++j) sums[j] = ColumnSum(sim, j);
  return sums;
}

void CheckCardinality(const Instance& inst, int n) {
  if (n < 1 || n > inst.size()) {
    throw ValidationError("n out of range: " + std::to_string(n) + " not in [1, " +
                          std::to_string(inst.size()) + "]");
  }
}

SelectionResult EmptyResult(const Instance& inst, std::string solver, int n) {
  SelectionResult r;
  r.solver = std::move(solver);
  r.n = n;
  r.lambda = inst.lambda;
  r.normalize_coverage = inst.normalize_coverage;
  return r;
}

void TakeStep(GainState& state, const Instance& inst, int v, SelectionResult& result) {
  result.gains.push_back(state.MarginalGain(v));
  state.Add(v);
  result.order.push_back(v);
  result.objective_trace.push_back(Objective(state.selection(), inst));
}

}  // namespace

void Instance::Validate() const {
  if (!similarity) throw ValidationError("instance has no similarity matrix");
  if (similarity->kind() != MatrixKind::kSimilarity) {
    throw ValidationError("instance needs a similarity-kind matrix");
  }
  similarity->Validate();
  const int n = size();
  if (cluster_of.size() != static_cast<size_t>(n)) {
    throw ValidationError("cluster assignment length differs from |V|");
  }
  if (num_clusters < 1) throw ValidationError("instance needs K >= 1");
  for (int k : cluster_of) {
    if (k < 0 || k >= num_clusters) throw ValidationError("cluster id out of range");
  }
  if (rewards.size() != static_cast<size_t>(n)) throw ValidationError("rewards length differs from |V|");
  for (double r : rewards) {
    if (!std::isfinite(r)) throw ValidationError("non-finite reward");
    if (r < 0) throw ValidationError("negative reward");
  }
  if (!std::isfinite(lambda) || lambda < 0) throw ValidationError("lambda must be finite and >= 0");
  for (int j = 0; j < n; ++j) {
    if (ColumnSum(*similarity, j) < 0) {
      throw ValidationError("negative similarity column sum at channel " + std::to_string(j) +
                            " (coverage would not be monotone)");
    }
  }
}

Instance Instance::FromClustering(std::shared_ptr<const PairwiseMatrix> similarity,
                                  const Clustering& clustering, std::vector<double> rewards,
                                  double lambda, bool normalize_coverage) {
  Instance inst;
  inst.similarity = std::move(similarity);
  inst.cluster_of = clustering.assignment;
  inst.num_clusters = clustering.num_clusters();
  inst.rewards = std::move(rewards);
  inst.lambda = lambda;
  inst.normalize_coverage = normalize_coverage;
  inst.Validate();
  return inst;
}

double Coverage(std::span<const int> selected, const Instance& inst) {
  CheckSelection(selected, inst);
  const double scale = inst.coverage_scale();
  double total = 0.0;
  for (int j : selected) total += ColumnSum(*inst.similarity, j) * scale;
  return total;
}

double Diversity(std::span<const int> selected, const Instance& inst) {
  CheckSelection(selected, inst);
  std::vector<double> cluster_reward(inst.num_clusters, 0.0);
  std::vector<int> touched;
  for (int v : selected) {
    const int k = inst.cluster_of[v];
    if (cluster_reward[k] == 0.0 &&
        std::find(touched.begin(), touched.end(), k) == touched.end()) {
      touched.push_back(k);
    }
    cluster_reward[k] += inst.rewards[v];
  }
  // Terms summed in ascending order: independent of how clusters are numbered.
  std::vector<double> terms;
  terms.reserve(touched.size());
  for (int k : touched) terms.push_back(std::log1p(cluster_reward[k]));
  std::sort(terms.begin(), terms.end());
  double total = 0.0;
  for (double t : terms) total += t;
  return total;
}

double Objective(std::span<const int> selected, const Instance& inst) {
  return Coverage(selected, inst) + inst.lambda * Diversity(selected, inst);
}

GainState::GainState(const Instance& inst)
    : inst_(inst),
      column_sums_(ColumnSums(*inst.similarity)),
      cluster_reward_(inst.num_clusters, 0.0),
      selected_(inst.size(), false) {}

double GainState::MarginalGain(int v) const {
  if (selected_[v]) throw ValidationError("channel " + std::to_string(v) + " already selected");
  const double s = cluster_reward_[inst_.cluster_of[v]];
  return column_sums_[v] * inst_.coverage_scale() +
         inst_.lambda * (std::log1p(s + inst_.rewards[v]) - std::log1p(s));
}

void GainState::Add(int v) {
  if (selected_[v]) throw ValidationError("channel " + std::to_string(v) + " already selected");
  selected_[v] = true;
  cluster_reward_[inst_.cluster_of[v]] += inst_.rewards[v];
  order_.push_back(v);
}

SelectionResult Greedy(const Instance& inst, int n) {
  inst.Validate();
  CheckCardinality(inst, n);
  SelectionResult result = EmptyResult(inst, "greedy", n);
  GainState state(inst);
  const int size = inst.size();
  std::vector<double> gains(size);

  for (int step = 0; step < n; ++step) {
    double best = kNegInf;
    for (int v = 0; v < size; ++v) {
      gains[v] = state.selected(v) ? kNegInf : state.MarginalGain(v);
      best = std::max(best, gains[v]);
    }
    int chosen = -1;
    for (int v = 0; v < size; ++v) {
      if (!state.selected(v) && gains[v] >= best - kTieTolerance) {
        chosen = v;
        break;
      }
    }
    TakeStep(state, inst, chosen, result);
  }
  return result;
}

SelectionResult LazyGreedy(const Instance& inst, int n) {
  inst.Validate();
  CheckCardinality(inst, n);
  SelectionResult result = EmptyResult(inst, "lazy_greedy", n);
  GainState state(inst);

  struct Entry {
    double bound;
    int index;
    int fresh_at;  // step at which `bound` was computed exactly
  };
  auto lower_priority = [](const Entry& a, const Entry& b) {
    if (a.bound != b.bound) return a.bound < b.bound;
    return a.index > b.index;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(lower_priority)> heap(lower_priority);
  for (int v = 0; v < inst.size(); ++v) heap.push({state.MarginalGain(v), v, 0});

  std::vector<Entry> popped;
  for (int step = 0; step < n; ++step) {
    popped.clear();
    double best = kNegInf;
    // Any entry left in the heap has gain <= bound < best - tolerance, so it
    // cannot be among the tied candidates Greedy would consider.
    while (!heap.empty() && heap.top().bound + kStaleBoundSlack >= best - kTieTolerance) {
      Entry e = heap.top();
      heap.pop();
      if (e.fresh_at != step) {
        e.bound = state.MarginalGain(e.index);
        e.fresh_at = step;
      }
      best = std::max(best, e.bound);
      popped.push_back(e);
    }
    size_t chosen = popped.size();
    for (size_t i = 0; i < popped.size(); ++i) {
      if (popped[i].bound >= best - kTieTolerance &&
          (chosen == popped.size() || popped[i].index < popped[chosen].index)) {
        chosen = i;
      }
    }
    const int v = popped[chosen].index;
    for (size_t i = 0; i < popped.size(); ++i) {
      if (i != chosen) heap.push(popped[i]);
    }
    TakeStep(state, inst, v, result);
  }
  return result;
}

SelectionResult BruteForce(const Instance& inst, int n) {
  inst.Validate();
  CheckCardinality(inst, n);
  const int size = inst.size();
  const int k = n;

  // C(size, k) with an early exit past the limit.
  uint64_t combos = 1;
  for (int i = 1; i <= k; ++i) {
    combos = combos * static_cast<uint64_t>(size - k + i) / static_cast<uint64_t>(i);
    if (combos > kBruteForceLimit) {
      throw ValidationError("instance too large for brute force: C(" + std::to_string(size) +
                            ", " + std::to_string(k) + ") exceeds " +
                            std::to_string(kBruteForceLimit));
    }
  }

  // Lexicographic enumeration; two passes so the tie rule is exact.
  auto for_each_subset = [&](auto&& fn) {
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    while (true) {
      if (!fn(idx)) return;
      int i = k - 1;
      while (i >= 0 && idx[i] == size - k + i) --i;
      if (i < 0) return;
      ++idx[i];
      for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
  };

  std::vector<double> values;
  values.reserve(combos);
  double best = kNegInf;
  for_each_subset([&](const std::vector<int>& idx) {
    values.push_back(Objective(idx, inst));
    best = std::max(best, values.back());
    return true;
  });
  std::vector<int> winner;
  size_t position = 0;
  for_each_subset([&](const std::vector<int>& idx) {
    if (values[position++] >= best - kTieTolerance) {
      winner = idx;
      return false;
    }
    return true;
  });

  SelectionResult result = EmptyResult(inst, "brute_force", n);
  result.order = winner;
  double previous = 0.0;
  for (size_t i = 0; i < winner.size(); ++i) {
    const double value = Objective(std::span<const int>(winner.data(), i + 1), inst);
    result.gains.push_back(value - previous);
    result.objective_trace.push_back(value);
    previous = value;
  }
  return result;
}

PropertyReport CheckProperties(const Instance& inst, int trials, uint64_t seed) {
  if (trials < 1) throw ValidationError("trials must be >= 1");
  inst.Validate();
  const int size = inst.size();
  PropertyReport report;
  report.trials = trials;
  report.min_monotone_slack = std::numeric_limits<double>::infinity();
  report.min_submodular_slack = std::numeric_limits<double>::infinity();
  if (size < 1) return report;

  CounterRng rng(seed);
  std::vector<int> perm(size);
  std::vector<int> with_v;
  for (int t = 0; t < trials; ++t) {
    for (int i = 0; i < size; ++i) perm[i] = i;
    for (int i = size - 1; i > 0; --i) std::swap(perm[i], perm[rng.Below(i + 1)]);
    const int p_size = static_cast<int>(rng.Below(size));       // |P| <= |V| - 1
    const int r_size = static_cast<int>(rng.Below(p_size + 1));  // |R| <= |P|
    const int v = perm[p_size];

    std::span<const int> p(perm.data(), p_size);
    std::span<const int> r(perm.data(), r_size);
    auto gain_of = [&](std::span<const int> base) {
      with_v.assign(base.begin(), base.end());
      with_v.push_back(v);
      return Objective(with_v, inst) - Objective(base, inst);
    };
    const double gain_p = gain_of(p);
    const double gain_r = gain_of(r);

    const double monotone_slack = std::min(gain_p, gain_r);
    const double submodular_slack = gain_r - gain_p;
    report.min_monotone_slack = std::min(report.min_monotone_slack, monotone_slack);
    report.min_submodular_slack = std::min(report.min_submodular_slack, submodular_slack);
    if (monotone_slack < -kObjectiveTolerance) ++report.monotonicity_violations;
    if (submodular_slack < -kObjectiveTolerance) ++report.submodularity_violations;
  }
  return report;
}

nlohmann::json ToJson(const PropertyReport& report) {
  return {{"trials", report.trials},
          {"monotonicity_violations", report.monotonicity_violations},
          {"submodularity_violations", report.submodularity_violations},
          {"min_monotone_slack", report.min_monotone_slack},
          {"min_submodular_slack", report.min_submodular_slack},
          {"ok", report.ok()}};
}

}  // namespace stylecover
