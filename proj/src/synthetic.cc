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

#include "stylecover/synthetic.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "stylecover/rng.h"

namespace stylecover {
namespace {

struct Grid {
  int rows = 0;
  int cols = 0;
};

Grid TileGrid(int clusters) {
  Grid g;
  g.cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(clusters))));
  g.rows = (clusters + g.cols - 1) / g.cols;
  return g;
}

std::vector<Tile> LayoutTiles(const PlantedSpec& spec) {
  const Grid g = TileGrid(spec.clusters);
  const int tile_h = spec.height / g.rows;
  const int tile_w = spec.width / g.cols;
  if (tile_h < 1 || tile_w < 1) {
    throw ValidationError("supports do not fit: " + std::to_string(spec.clusters) +
                          " tiles on a " + std::to_string(g.rows) + "x" + std::to_string(g.cols) +
                          " grid need at least that many rows and columns");
  }
  std::vector<Tile> tiles(spec.clusters);
  for (int k = 0; k < spec.clusters; ++k) {
    const int r = k / g.cols;
    const int c = k % g.cols;
    tiles[k] = {r * tile_h, (r + 1) * tile_h, c * tile_w, (c + 1) * tile_w};
  }
  return tiles;
}

bool Inside(const Tile& t, int y, int x) {
  return y >= t.row0 && y < t.row1 && x >= t.col0 && x < t.col1;
}

}  // namespace

void PlantedSpec::Validate() const {
  if (clusters < 1) throw ValidationError("K must be >= 1");
  if (per_cluster < 1) throw ValidationError("per_cluster must be >= 1");
  if (codes < 1) throw ValidationError("codes must be >= 1");
  if (height < 1 || width < 1) throw ValidationError("map size must be >= 1x1");
  if (!(noise >= 0) || !std::isfinite(noise)) throw ValidationError("noise sigma must be >= 0");
  if (!reward_profile.empty() && reward_profile.size() != static_cast<size_t>(clusters)) {
    throw ValidationError("reward profile needs one value per cluster");
  }
  for (double r : reward_profile) {
    if (!(r >= 0) || !std::isfinite(r)) throw ValidationError("negative reward in profile");
  }
  if (!(reward_jitter >= 0) || reward_jitter > 1) throw ValidationError("reward jitter must be in [0,1]");
  if (layers < 1 || layers > clusters) throw ValidationError("layers must be in [1, K]");
  if (with_pairs && pair_window < 1) throw ValidationError("pair window must be >= 1");
  LayoutTiles(*this);
}

nlohmann::json PlantedSpec::ToJson() const {
  return {{"clusters", clusters},         {"per_cluster", per_cluster},
          {"codes", codes},               {"height", height},
          {"width", width},               {"noise", noise},
          {"seed", seed},                 {"reward_profile", reward_profile},
          {"reward_jitter", reward_jitter}, {"layers", layers},
          {"alpha", alpha},               {"truncation", truncation},
          {"with_pairs", with_pairs},     {"pair_window", pair_window},
          {"pair_amplitude", pair_amplitude}};
}

PlantedDataset GeneratePlanted(const PlantedSpec& spec) {
  spec.Validate();
  PlantedDataset out;
  out.supports = LayoutTiles(spec);
  const int v_count = spec.clusters * spec.per_cluster;
  const int map_size = spec.height * spec.width;

  Manifest& m = out.manifest;
  m.num_channels = v_count;
  m.num_codes = spec.codes;
  m.map_height = spec.height;
  m.map_width = spec.width;
  m.alpha = spec.alpha;
  m.truncation = spec.truncation;
  m.provenance = "planted partition (synthetic), seed " + std::to_string(spec.seed);

  std::vector<int> next_in_layer(spec.layers, 0);
  for (int k = 0; k < spec.clusters; ++k) {
    const int layer = k * spec.layers / spec.clusters;
    for (int j = 0; j < spec.per_cluster; ++j) {
      m.channels.push_back({layer, next_in_layer[layer]++});
      out.truth.push_back(k);
    }
  }

  CounterRng map_rng(spec.seed);
  out.signatures.resize(v_count);
  for (int i = 0; i < v_count; ++i) {
    auto& s = out.signatures[i];
    s.channel = m.channels[i];
    s.num_codes = spec.codes;
    s.map_size = map_size;
    s.values.resize(static_cast<size_t>(spec.codes) * map_size);
    const Tile& tile = out.supports[out.truth[i]];
    for (int code = 0; code < spec.codes; ++code) {
      auto map = s.MutableMap(code);
      for (int p = 0; p < map_size; ++p) {
        double v = Inside(tile, p / spec.width, p % spec.width) ? 1.0 : 0.0;
        if (spec.noise > 0) v += spec.noise * map_rng.Normal();
        map[p] = static_cast<float>(std::clamp(v, 0.0, 1.0));
      }
    }
  }

  CounterRng reward_rng(spec.seed ^ kRewardStream);
  out.rewards.resize(v_count);
  for (int i = 0; i < v_count; ++i) {
    const double base = spec.reward_profile.empty() ? 1.0 : spec.reward_profile[out.truth[i]];
    const double jitter = spec.reward_jitter * (2.0 * reward_rng.Uniform() - 1.0);
    out.rewards[i] = static_cast<float>(base * (1.0 + jitter));
  }

  if (spec.with_pairs) {
    const int s = spec.pair_window;
    const int half = (s - 1) / 2;
    const int ih = spec.height + s - 1;
    const int iw = spec.width + s - 1;
    const size_t image_size = static_cast<size_t>(ih) * iw;
    CounterRng pair_rng(spec.seed ^ kPairStream);
    std::vector<std::vector<double>> bases(spec.codes, std::vector<double>(image_size));
    for (auto& base : bases) {
      for (double& px : base) px = pair_rng.Uniform(64.0, 192.0);
    }
    const double pixel_sigma = 255.0 * spec.noise / 2.0;
    Matrix pairs;
    pairs.dims = {static_cast<uint32_t>(v_count), static_cast<uint32_t>(spec.codes), 2,
                  static_cast<uint32_t>(ih), static_cast<uint32_t>(iw)};
    pairs.values.reserve(static_cast<size_t>(v_count) * spec.codes * 2 * image_size);
    for (int i = 0; i < v_count; ++i) {
      const Tile& tile = out.supports[out.truth[i]];
      for (int code = 0; code < spec.codes; ++code) {
        for (double sign : {+1.0, -1.0}) {
          for (size_t p = 0; p < image_size; ++p) {
            const int y = static_cast<int>(p / iw) - half;
            const int x = static_cast<int>(p % iw) - half;
            double px = bases[code][p];
            if (Inside(tile, y, x)) px += sign * spec.pair_amplitude;
            if (pixel_sigma > 0) px += pixel_sigma * pair_rng.Normal();
            pairs.values.push_back(static_cast<float>(std::clamp(px, 0.0, 255.0)));
          }
        }
      }
    }
    out.pairs = std::move(pairs);
  }
  return out;
}

void WritePlanted(const PlantedDataset& data, const PlantedSpec& spec,
                  const std::filesystem::path& dir) {
  WriteDataset(data.manifest, data.signatures, data.rewards, dir);
  if (data.pairs) {
    WriteMatrix(data.pairs->dims, data.pairs->values, dir / kPairsFile);
  } else {
    std::filesystem::remove(dir / kPairsFile);
  }
  nlohmann::json truth;
  truth["assignment"] = data.truth;
  auto& supports = truth["supports"] = nlohmann::json::array();
  for (size_t k = 0; k < data.supports.size(); ++k) {
    const Tile& t = data.supports[k];
    supports.push_back({{"cluster", k}, {"row0", t.row0}, {"row1", t.row1},
                        {"col0", t.col0}, {"col1", t.col1}});
  }
  truth["spec"] = spec.ToJson();
  WriteJsonFile(truth, dir / "truth.json");
}

Instance GenerateThreeChannelExample(double lambda) {
  auto sim = std::make_shared<PairwiseMatrix>(3, MatrixKind::kSimilarity);
  Instance inst;
  inst.similarity = sim;
  inst.cluster_of = {0, 0, 1};
  inst.num_clusters = 2;
  inst.rewards = {5.0, 4.0, 3.0};
  inst.lambda = lambda;
  inst.Validate();
  return inst;
}

Instance GenerateRandomInstance(const RandomInstanceSpec& spec) {
  if (spec.size < 1 || spec.clusters < 1 || spec.clusters > spec.size) {
    throw ValidationError("random instance needs 1 <= K <= |V|");
  }
  CounterRng rng(spec.seed);
  Instance inst;
  inst.num_clusters = spec.clusters;
  inst.cluster_of.resize(spec.size);
  for (int i = 0; i < spec.size; ++i) {
    inst.cluster_of[i] = i < spec.clusters ? i : static_cast<int>(rng.Below(spec.clusters));
  }
  auto sim = std::make_shared<PairwiseMatrix>(spec.size, MatrixKind::kSimilarity);
  for (int i = 0; i < spec.size; ++i) {
    for (int j = i + 1; j < spec.size; ++j) {
      double v;
      if (!spec.block_similarity) {
        v = rng.Uniform();
      } else if (inst.cluster_of[i] == inst.cluster_of[j]) {
        v = rng.Uniform(0.6, 1.0);
      } else {
        v = rng.Uniform(0.0, 0.2);
      }
      sim->Set(i, j, v);
    }
  }
  inst.similarity = std::move(sim);
  inst.rewards.resize(spec.size);
  for (double& r : inst.rewards) r = rng.Uniform(0.0, spec.max_reward);
  inst.lambda = spec.lambda;
  inst.normalize_coverage = spec.normalize_coverage;
  return inst;
}

}  // namespace stylecover
