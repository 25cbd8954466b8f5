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

#include "stylecover/pipeline.h"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "stylecover/interchange.h"
#include "stylecover/parallel.h"
#include "stylecover/simd/kernels.h"

namespace stylecover {
namespace fs = std::filesystem;

namespace {

std::string FormatDouble(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

void WriteTextFile(const std::string& text, const fs::path& file) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + file.string());
  out << text;
  if (!out) throw IoError("write failed: " + file.string());
}

void WriteRunManifest(const fs::path& out, const std::string& stage, nlohmann::json config) {
  nlohmann::json j;
  j["stage"] = stage;
  j["config"] = std::move(config);
  j["version"] = kVersion;
  j["simd_backend"] = std::string(simd::BackendName(simd::ActiveBackend()));
  WriteJsonFile(j, out / ("run_" + stage + ".json"));
}

void RequireDataset(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ValidationError("dataset directory not found: " + dir.string());
}

PairwiseMatrix ReadPairwise(const fs::path& dir, const char* file, MatrixKind kind,
                            int expected_size, const char* producer) {
  if (!fs::exists(dir / file)) {
    throw ValidationError(std::string("missing artifact ") + file + "; run `" + producer +
                          "` first");
  }
  PairwiseMatrix m = PairwiseMatrix::FromMatrix(ReadMatrix(dir / file), kind);
  if (m.size() != expected_size) {
    throw ValidationError(std::string(file) + " size disagrees with manifest num_channels");
  }
  return m;
}

Clustering ReadClustering(const fs::path& dir, const Manifest& manifest) {
  if (!fs::exists(dir / kClustersFile)) {
    throw ValidationError("missing artifact clusters.json; run `cluster` first");
  }
  Clustering cl = Clustering::FromJson(ReadJsonFile(dir / kClustersFile));
  if (cl.ground_set.empty()) {
    if (cl.size() != manifest.num_channels) {
      throw ValidationError("clusters.json covers a different number of channels");
    }
    cl.ground_set.resize(cl.size());
    for (int i = 0; i < cl.size(); ++i) cl.ground_set[i] = i;
  }
  for (int g : cl.ground_set) {
    if (g < 0 || g >= manifest.num_channels) {
      throw ValidationError("clusters.json references channel index outside the dataset");
    }
  }
  return cl;
}

// Selection problem restricted to the clustered channels that pass the layer
// filter.
struct LoadedInstance {
  Manifest manifest;
  Clustering clustering;
  std::vector<int> dataset_index;     // per local element
  std::vector<int> original_cluster;  // clusters.json id per local element
  Instance instance;
};

LoadedInstance LoadInstance(const fs::path& dir, const std::vector<int>& layers, double lambda,
                            bool normalize) {
  RequireDataset(dir);
  LoadedInstance out;
  out.manifest = ReadManifest(dir);
  out.clustering = ReadClustering(dir, out.manifest);

  const auto allowed_list = FilterLayers(out.manifest, layers);
  const std::set<int> allowed(allowed_list.begin(), allowed_list.end());
  for (int local = 0; local < out.clustering.size(); ++local) {
    const int g = out.clustering.ground_set[local];
    if (!allowed.count(g)) continue;
    out.dataset_index.push_back(g);
    out.original_cluster.push_back(out.clustering.assignment[local]);
  }
  if (out.dataset_index.empty()) {
    throw ValidationError("no clustered channels remain after the layer filter");
  }

  PairwiseMatrix full = ReadPairwise(dir, kSimilarityFile, MatrixKind::kSimilarity,
                                     out.manifest.num_channels, "distances");
  bool identity = static_cast<int>(out.dataset_index.size()) == full.size();
  for (size_t i = 0; identity && i < out.dataset_index.size(); ++i) {
    identity = out.dataset_index[i] == static_cast<int>(i);
  }
  auto sim = std::make_shared<PairwiseMatrix>(identity ? std::move(full)
                                                       : full.Subset(out.dataset_index));

  const auto rewards = ReadRewards(out.manifest, dir);
  if (!rewards) throw ValidationError("missing artifact rewards.scx; run `rewards` first");

  const Clustering local = Clustering::FromAssignment(out.original_cluster);
  std::vector<double> local_rewards;
  local_rewards.reserve(out.dataset_index.size());
  for (int g : out.dataset_index) local_rewards.push_back((*rewards)[g]);
  out.instance = Instance::FromClustering(std::move(sim), local, std::move(local_rewards), lambda,
                                          normalize);
  return out;
}

SelectionResult Solve(const Instance& inst, int n, const std::string& solver) {
  if (solver == "greedy") return Greedy(inst, n);
  if (solver == "lazy") return LazyGreedy(inst, n);
  if (solver == "brute") return BruteForce(inst, n);
  throw ValidationError("unknown solver '" + solver + "' (greedy | lazy | brute)");
}

int CountDistinct(const std::vector<int>& ids) {
  return static_cast<int>(std::set<int>(ids.begin(), ids.end()).size());
}

std::vector<RegionMask> ReadManifestMasks(const fs::path& dir, const Manifest& manifest) {
  std::vector<RegionMask> masks;
  for (const auto& entry : manifest.region_masks) {
    RegionMask mask = ReadRegionMask(dir / entry.file, entry.name);
    if (mask.height != manifest.map_height || mask.width != manifest.map_width) {
      throw ValidationError("mask '" + entry.name + "' dimensions differ from the manifest maps");
    }
    masks.push_back(std::move(mask));
  }
  return masks;
}

void LabelByMasks(Clustering& cl, const std::vector<RegionMask>& masks,
                  std::span<const ChannelSignature> signatures, double label_min) {
  cl.labels.assign(cl.num_clusters(), "");
  for (int k = 0; k < cl.num_clusters(); ++k) {
    double best = -1.0;
    for (const auto& mask : masks) {
      const double score = RegionMatch(cl, k, mask, signatures);
      if (score > best) {
        best = score;
        if (score >= label_min) cl.labels[k] = mask.name;
      }
    }
  }
}

nlohmann::json ClusterOptionsJson(const ClusterOptions& o) {
  return {{"linkage", std::string(LinkageName(o.linkage))},
          {"threshold", o.threshold},
          {"layers", o.layers},
          {"per_layer", o.per_layer},
          {"label_by_masks", o.label_by_masks},
          {"label_min", o.label_min}};
}

nlohmann::json SelectOptionsJson(const SelectOptions& o) {
  return {{"n", o.n},           {"lambda", o.lambda},   {"normalize", o.normalize},
          {"solver", o.solver}, {"layers", o.layers}, {"record_time", o.record_time}};
}

std::vector<int> ParseIntList(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
      throw ValidationError("expected comma-separated integers, got '" + text + "'");
    }
    out.push_back(v);
  }
  return out;
}

std::vector<double> ParseDoubleList(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
      throw ValidationError("expected comma-separated numbers, got '" + text + "'");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace

std::vector<int> FilterLayers(const Manifest& manifest, const std::vector<int>& layers) {
  const std::set<int> wanted(layers.begin(), layers.end());
  std::vector<int> kept;
  for (int i = 0; i < manifest.num_channels; ++i) {
    if (wanted.empty() || wanted.count(manifest.channels[i].layer)) kept.push_back(i);
  }
  if (kept.empty()) throw ValidationError("layer filter leaves no channels");
  return kept;
}

void SynthStage(const PlantedSpec& spec, const fs::path& out) {
  const PlantedDataset data = GeneratePlanted(spec);
  WritePlanted(data, spec, out);
  WriteRunManifest(out, "synth", spec.ToJson());
}

void SignaturesStage(const fs::path& dir, const WindowSpec& window, int threads) {
  RequireDataset(dir);
  Manifest manifest = ReadManifest(dir);
  if (!fs::exists(dir / kPairsFile)) {
    throw ValidationError("missing artifact pairs.scx (image pairs from the extractor)");
  }
  const Matrix pairs = ReadMatrix(dir / kPairsFile);
  if (pairs.dims.size() != 5 || pairs.dims[0] != static_cast<uint32_t>(manifest.num_channels) ||
      pairs.dims[1] != static_cast<uint32_t>(manifest.num_codes) || pairs.dims[2] != 2) {
    throw ValidationError("pairs.scx must have dims [V, M, 2, H, W] matching the manifest");
  }
  const int ih = static_cast<int>(pairs.dims[3]);
  const int iw = static_cast<int>(pairs.dims[4]);
  if (window.size > ih || window.size > iw) throw ValidationError("window larger than image");
  const size_t image_size = static_cast<size_t>(ih) * iw;

  manifest.map_height = ih - window.size + 1;
  manifest.map_width = iw - window.size + 1;
  std::vector<ChannelSignature> signatures(manifest.num_channels);
  ParallelFor(signatures.size(), ResolveThreads(threads), [&](size_t v) {
    auto& s = signatures[v];
    s.channel = manifest.channels[v];
    s.num_codes = manifest.num_codes;
    s.map_size = manifest.map_size();
    s.values.reserve(static_cast<size_t>(s.num_codes) * s.map_size);
    for (int m = 0; m < manifest.num_codes; ++m) {
      const size_t base = ((v * manifest.num_codes + m) * 2) * image_size;
      Image plus(ih, iw), minus(ih, iw);
      std::copy_n(pairs.values.begin() + base, image_size, plus.pixels.begin());
      std::copy_n(pairs.values.begin() + base + image_size, image_size, minus.pixels.begin());
      const DifferenceMap d = ComputeDifferenceMap(plus, minus, window);
      for (double x : d.values) s.values.push_back(static_cast<float>(x));
    }
  });
  WriteSignatures(manifest, signatures, dir);
  WriteManifest(manifest, dir);
  WriteRunManifest(dir, "signatures",
                   {{"window", window.kind == WindowKind::kGaussian ? "gaussian" : "uniform"},
                    {"window_size", window.size},
                    {"sigma", window.sigma}});
}

void DistancesStage(const fs::path& dir, SignatureMode mode, int threads, bool csv_mirror) {
  RequireDataset(dir);
  const Manifest manifest = ReadManifest(dir);
  const auto signatures = ReadSignatures(manifest, dir);
  const SignatureMatrices m = BuildMatrices(signatures, {mode, threads});
  const Matrix dist = m.distance.ToMatrix();
  const Matrix sim = m.similarity.ToMatrix();
  WriteMatrix(dist.dims, dist.values, dir / kDistancesFile);
  WriteMatrix(sim.dims, sim.values, dir / kSimilarityFile);
  if (csv_mirror && dist.values.size() <= kCsvMaxValues) {
    WriteMatrixCsv(dist, dir / "distances.csv");
    WriteMatrixCsv(sim, dir / "similarity.csv");
  }
  WriteRunManifest(dir, "distances",
                   {{"mode", mode == SignatureMode::kPerCode ? "per_code" : "concatenated"},
                    {"csv", csv_mirror}});
}

Clustering ClusterStage(const fs::path& dir, const ClusterOptions& options) {
  RequireDataset(dir);
  const Manifest manifest = ReadManifest(dir);
  const PairwiseMatrix dist = ReadPairwise(dir, kDistancesFile, MatrixKind::kDistance,
                                           manifest.num_channels, "distances");
  const std::vector<int> ground = FilterLayers(manifest, options.layers);

  std::vector<ChannelSignature> signatures;
  std::vector<RegionMask> masks;
  if (options.label_by_masks) {
    masks = ReadManifestMasks(dir, manifest);
    if (masks.empty()) throw ValidationError("--label-by-masks needs region_masks in the manifest");
    signatures = ReadSignatures(manifest, dir);
  }

  auto cluster_subset = [&](const std::vector<int>& members) {
    Clustering cl = Agglomerate(dist.Subset(members), options.linkage, options.threshold);
    cl.ground_set = members;
    if (options.label_by_masks) LabelByMasks(cl, masks, signatures, options.label_min);
    return cl;
  };

  Clustering result;
  if (options.per_layer) {
    std::map<int, std::vector<int>> by_layer;
    for (int g : ground) by_layer[manifest.channels[g].layer].push_back(g);
    std::vector<Clustering> layers;
    for (const auto& [layer, members] : by_layer) layers.push_back(cluster_subset(members));
    result = MergeLayerwise(layers);
  } else {
    result = cluster_subset(ground);
  }
  result.Validate();
  WriteJsonFile(result.ToJson(), dir / kClustersFile);
  WriteRunManifest(dir, "cluster", ClusterOptionsJson(options));
  return result;
}

void RewardsStage(const fs::path& dir, const RewardsOptions& options) {
  RequireDataset(dir);
  const Manifest manifest = ReadManifest(dir);
  std::vector<float> rewards;
  nlohmann::json config;
  if (options.import_file) {
    const fs::path& file = *options.import_file;
    const Matrix m = file.extension() == ".csv" ? ReadMatrixCsv(file) : ReadMatrix(file);
    if (m.dims.size() != 1 || m.dims[0] != static_cast<uint32_t>(manifest.num_channels)) {
      throw ValidationError("imported rewards must have dims [V]");
    }
    rewards = m.values;
    config = {{"import", file.string()}};
  } else {
    if (options.proxy != "pyramid") {
      throw ValidationError("unknown reward proxy '" + options.proxy + "'");
    }
    if (!fs::exists(dir / kPairsFile)) {
      throw ValidationError("missing artifact pairs.scx; the pyramid proxy needs image pairs");
    }
    const Matrix pairs = ReadMatrix(dir / kPairsFile);
    if (pairs.dims.size() != 5 || pairs.dims[0] != static_cast<uint32_t>(manifest.num_channels) ||
        pairs.dims[1] != static_cast<uint32_t>(manifest.num_codes) || pairs.dims[2] != 2) {
      throw ValidationError("pairs.scx must have dims [V, M, 2, H, W] matching the manifest");
    }
    const int ih = static_cast<int>(pairs.dims[3]);
    const int iw = static_cast<int>(pairs.dims[4]);
    const size_t image_size = static_cast<size_t>(ih) * iw;
    const PyramidEmbedder embedder;
    rewards.resize(manifest.num_channels);
    ParallelFor(rewards.size(), ResolveThreads(options.threads), [&](size_t v) {
      std::vector<ImagePair> channel_pairs(manifest.num_codes);
      for (int m = 0; m < manifest.num_codes; ++m) {
        const size_t base = ((v * manifest.num_codes + m) * 2) * image_size;
        auto& p = channel_pairs[m];
        p.plus = Image(ih, iw);
        p.minus = Image(ih, iw);
        std::copy_n(pairs.values.begin() + base, image_size, p.plus.pixels.begin());
        std::copy_n(pairs.values.begin() + base + image_size, image_size, p.minus.pixels.begin());
      }
      rewards[v] = static_cast<float>(ChannelReward(channel_pairs, embedder));
    });
    config = {{"proxy", options.proxy}, {"levels", embedder.levels()}};
  }
  WriteRewards(manifest, rewards, dir);
  WriteRunManifest(dir, "rewards", config);
}

nlohmann::json ToJson(const Selection& selection, const Manifest& manifest) {
  const SelectionResult& r = selection.result;
  nlohmann::json j;
  j["solver"] = r.solver;
  j["n"] = r.n;
  j["lambda"] = r.lambda;
  j["normalize_coverage"] = r.normalize_coverage;
  j["objective"] = r.objective();
  j["gains"] = r.gains;
  j["objective_trace"] = r.objective_trace;
  j["distinct_clusters"] = selection.distinct_clusters;
  auto& order = j["order"] = nlohmann::json::array();
  for (size_t i = 0; i < r.order.size(); ++i) {
    const ChannelRef& ref = manifest.channels[selection.dataset_index[i]];
    order.push_back({{"step", i + 1},
                     {"index", selection.dataset_index[i]},
                     {"layer", ref.layer},
                     {"channel", ref.channel},
                     {"cluster", selection.cluster[i]},
                     {"gain", r.gains[i]}});
  }
  if (r.wall_time_ms) j["wall_time_ms"] = *r.wall_time_ms;
  return j;
}

void WriteSelection(const Selection& selection, const Manifest& manifest, const fs::path& out) {
  WriteJsonFile(ToJson(selection, manifest), out / kSelectionJson);
  std::string csv = "step,channel,layer,cluster,gain\n";
  for (size_t i = 0; i < selection.result.order.size(); ++i) {
    const ChannelRef& ref = manifest.channels[selection.dataset_index[i]];
    csv += std::to_string(i + 1) + "," + std::to_string(ref.channel) + "," +
           std::to_string(ref.layer) + "," + std::to_string(selection.cluster[i]) + "," +
           FormatDouble(selection.result.gains[i]) + "\n";
  }
  WriteTextFile(csv, out / kSelectionCsv);
}

Selection SelectStage(const fs::path& dir, const SelectOptions& options) {
  const LoadedInstance loaded = LoadInstance(dir, options.layers, options.lambda, options.normalize);
  const auto start = std::chrono::steady_clock::now();
  Selection s;
  s.result = Solve(loaded.instance, options.n, options.solver);
  const auto stop = std::chrono::steady_clock::now();
  if (options.record_time) {
    s.result.wall_time_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  }
  for (int local : s.result.order) {
    s.dataset_index.push_back(loaded.dataset_index[local]);
    s.cluster.push_back(loaded.original_cluster[local]);
  }
  s.distinct_clusters = CountDistinct(s.cluster);
  return s;
}

std::vector<std::pair<double, int>> SweepStage(const fs::path& dir,
                                               const std::vector<double>& lambdas,
                                               const SelectOptions& base, const fs::path& out) {
  if (lambdas.empty()) throw ValidationError("sweep needs at least one lambda");
  std::vector<std::pair<double, int>> rows;
  std::string csv = "lambda,distinct_clusters\n";
  for (double lambda : lambdas) {
    SelectOptions o = base;
    o.lambda = lambda;
    o.record_time = false;
    const Selection s = SelectStage(dir, o);
    rows.emplace_back(lambda, s.distinct_clusters);
    csv += FormatDouble(lambda) + "," + std::to_string(s.distinct_clusters) + "\n";
  }
  WriteTextFile(csv, out / kSweepCsv);
  nlohmann::json config = SelectOptionsJson(base);
  config["lambdas"] = lambdas;
  WriteRunManifest(out, "sweep-lambda", config);
  return rows;
}

std::vector<RankedCluster> FilterRegionStage(const fs::path& dir,
                                             const RegionFilterOptions& options,
                                             const fs::path& out) {
  RequireDataset(dir);
  const Manifest manifest = ReadManifest(dir);
  const Clustering cl = ReadClustering(dir, manifest);
  RegionMask mask;
  if (options.mask_file) {
    mask = ReadRegionMask(*options.mask_file,
                          options.mask_name.empty() ? options.mask_file->stem().string()
                                                    : options.mask_name);
  } else {
    auto it = std::find_if(manifest.region_masks.begin(), manifest.region_masks.end(),
                           [&](const RegionMaskEntry& e) { return e.name == options.mask_name; });
    if (it == manifest.region_masks.end()) {
      throw ValidationError("no region mask named '" + options.mask_name + "' in the manifest");
    }
    mask = ReadRegionMask(dir / it->file, it->name);
  }
  if (mask.height != manifest.map_height || mask.width != manifest.map_width) {
    throw ValidationError("mask dimensions differ from the dataset maps");
  }
  const auto signatures = ReadSignatures(manifest, dir);
  const auto ranked = FilterByRegion(cl, mask, options.top_k, signatures);

  nlohmann::json j;
  j["mask"] = mask.name;
  j["top_k"] = options.top_k;
  auto& list = j["clusters"] = nlohmann::json::array();
  for (const auto& r : ranked) {
    nlohmann::json members = nlohmann::json::array();
    for (int local : cl.clusters[r.cluster]) {
      const int g = cl.ground_set[local];
      members.push_back({{"index", g},
                         {"layer", manifest.channels[g].layer},
                         {"channel", manifest.channels[g].channel}});
    }
    nlohmann::json entry = {{"cluster", r.cluster}, {"score", r.score}, {"members", members}};
    if (!cl.labels.empty()) entry["label"] = cl.labels[r.cluster];
    list.push_back(entry);
  }
  WriteJsonFile(j, out / "region_filter.json");
  WriteRunManifest(out, "filter-region",
                   {{"mask", mask.name}, {"top_k", options.top_k}});
  return ranked;
}

PropertyReport CheckStage(const fs::path& dir, const CheckOptions& options, const fs::path& out) {
  const LoadedInstance loaded = LoadInstance(dir, options.layers, options.lambda, options.normalize);
  const PropertyReport report = CheckProperties(loaded.instance, options.trials, options.seed);
  WriteJsonFile(ToJson(report), out / "check.json");
  WriteRunManifest(out, "check",
                   {{"trials", options.trials},
                    {"seed", options.seed},
                    {"lambda", options.lambda},
                    {"normalize", options.normalize},
                    {"layers", options.layers}});
  return report;
}

std::string ReportStage(const fs::path& dir, const fs::path& out) {
  RequireDataset(dir);
  const Manifest manifest = ReadManifest(dir);
  std::ostringstream md;
  md << "# Dataset report\n\n";
  md << "- channels: " << manifest.num_channels << "\n";
  md << "- style codes: " << manifest.num_codes << "\n";
  md << "- map size: " << manifest.map_height << "x" << manifest.map_width << "\n";
  md << "- alpha: " << manifest.alpha << ", truncation: " << manifest.truncation << "\n";
  std::set<int> layers;
  for (const auto& c : manifest.channels) layers.insert(c.layer);
  md << "- layers: " << layers.size() << "\n";
  if (!manifest.provenance.empty()) md << "- provenance: " << manifest.provenance << "\n";

  if (const auto rewards = ReadRewards(manifest, dir)) {
    const auto [lo, hi] = std::minmax_element(rewards->begin(), rewards->end());
    md << "- rewards: min " << *lo << ", max " << *hi << "\n";
  }
  if (fs::exists(dir / kClustersFile)) {
    const Clustering cl = ReadClustering(dir, manifest);
    std::vector<size_t> sizes;
    for (const auto& c : cl.clusters) sizes.push_back(c.size());
    const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
    md << "\n## Clusters\n\n- linkage: " << cl.linkage << ", threshold: " << cl.threshold
       << "\n- K: " << cl.num_clusters() << " (sizes " << *lo << " to " << *hi << ")\n";
  }
  if (fs::exists(dir / kSelectionJson)) {
    const auto sel = ReadJsonFile(dir / kSelectionJson);
    md << "\n## Selection\n\n- solver: " << sel.value("solver", "") << ", n: " << sel.value("n", 0)
       << ", lambda: " << sel.value("lambda", 0.0) << "\n- objective: " << sel.value("objective", 0.0)
       << "\n- distinct clusters: " << sel.value("distinct_clusters", 0) << "\n\n";
    md << "| step | layer | channel | cluster | gain |\n|---|---|---|---|---|\n";
    for (const auto& row : sel.at("order")) {
      md << "| " << row.at("step") << " | " << row.at("layer") << " | " << row.at("channel")
         << " | " << row.at("cluster") << " | " << row.at("gain").get<double>() << " |\n";
    }
  }
  const std::string text = md.str();
  WriteTextFile(text, out / "report.md");
  return text;
}

namespace {

// Flags shared by select, sweep-lambda and check.
void AddSelectionFlags(CLI::App* cmd, SelectOptions& o, std::string& layers) {
  cmd->add_option("-n", o.n, "Cardinality bound")->check(CLI::PositiveNumber);
  cmd->add_option("--lambda", o.lambda, "Diversity tradeoff")->check(CLI::NonNegativeNumber);
  cmd->add_flag("--normalize", o.normalize, "Divide coverage by |V|");
  cmd->add_option("--layers", layers, "Comma-separated layers forming the ground set");
}

}  // namespace

int RunCli(const std::vector<std::string>& args) {
  CLI::App app{"Representative and diverse style-channel selection over SCX datasets",
               "stylecover"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker cap (default: SCX_THREADS or 1)");

  std::string dataset;
  fs::path out;

  PlantedSpec spec;
  spec.codes = 128;
  std::string size = "16x16";
  std::string profile;
  auto* synth = app.add_subcommand("synth", "Generate a planted-partition dataset");
  synth->add_option("--clusters", spec.clusters, "Planted clusters K");
  synth->add_option("--per-cluster", spec.per_cluster, "Channels per cluster");
  synth->add_option("--codes", spec.codes, "Style codes M");
  synth->add_option("--size", size, "Map size HxW");
  synth->add_option("--noise", spec.noise, "Gaussian noise sigma");
  synth->add_option("--seed", spec.seed, "Generator seed");
  synth->add_option("--layers", spec.layers, "Layers the clusters are spread over");
  synth->add_option("--reward-profile", profile, "Comma-separated base reward per cluster");
  synth->add_option("--reward-jitter", spec.reward_jitter, "Relative reward jitter");
  synth->add_option("--alpha", spec.alpha, "Perturbation magnitude (metadata)");
  synth->add_option("--truncation", spec.truncation, "Truncation (metadata)");
  synth->add_flag("--pairs", spec.with_pairs, "Also render (+a, -a) image pairs");
  synth->add_option("--pair-window", spec.pair_window, "Window side the pairs are sized for");
  synth->add_option("--out", out, "Output dataset directory")->required();

  std::string window_kind = "gaussian";
  int window_size = 0;
  double sigma = 1.5;
  auto* sigs = app.add_subcommand("signatures", "Difference maps from image pairs");
  sigs->add_option("dataset", dataset)->required();
  sigs->add_option("--window", window_kind, "gaussian | uniform");
  sigs->add_option("--window-size", window_size, "Window side (default 11 gaussian, 7 uniform)");
  sigs->add_option("--sigma", sigma, "Gaussian sigma");

  bool concat = false;
  bool csv = false;
  auto* dists = app.add_subcommand("distances", "Pairwise distance and similarity matrices");
  dists->add_option("dataset", dataset)->required();
  dists->add_flag("--concat", concat, "Cosine over concatenated maps instead of per code");
  dists->add_flag("--csv", csv, "Also write CSV mirrors when small");

  ClusterOptions cluster_opts;
  std::string linkage = "average";
  std::string cluster_layers;
  auto* cluster = app.add_subcommand("cluster", "Agglomerative clustering");
  cluster->add_option("dataset", dataset)->required();
  cluster->add_option("--linkage", linkage, "average | complete | single");
  cluster->add_option("--threshold", cluster_opts.threshold, "Distance threshold")
      ->check(CLI::PositiveNumber);
  cluster->add_option("--layers", cluster_layers, "Comma-separated layers");
  cluster->add_flag("--per-layer", cluster_opts.per_layer, "Cluster each layer separately");
  cluster->add_flag("--label-by-masks", cluster_opts.label_by_masks,
                    "Label clusters by best-matching region mask");
  cluster->add_option("--label-min", cluster_opts.label_min, "Minimum match for a label");

  RewardsOptions reward_opts;
  std::string import_file;
  auto* rewards = app.add_subcommand("rewards", "Per-channel rewards");
  rewards->add_option("dataset", dataset)->required();
  auto* proxy_opt = rewards->add_option("--proxy", reward_opts.proxy, "Reward proxy (pyramid)");
  rewards->add_option("--import", import_file, "Import rewards (.scx or .csv, dims [V])")
      ->excludes(proxy_opt);

  SelectOptions select_opts;
  std::string select_layers;
  auto* select = app.add_subcommand("select", "Greedy submodular selection");
  select->add_option("dataset", dataset)->required();
  AddSelectionFlags(select, select_opts, select_layers);
  select->add_option("--solver", select_opts.solver, "greedy | lazy | brute");
  select->add_flag("--record-time", select_opts.record_time, "Store wall time in selection.json");
  select->add_option("--out", out, "Output directory (default: dataset)");

  std::string lambdas = "0,1,5,25,100";
  auto* sweep = app.add_subcommand("sweep-lambda", "Distinct clusters among top n per lambda");
  sweep->add_option("dataset", dataset)->required();
  AddSelectionFlags(sweep, select_opts, select_layers);
  sweep->add_option("--lambdas", lambdas, "Comma-separated lambdas");
  sweep->add_option("--out", out, "Output directory (default: dataset)");

  RegionFilterOptions region_opts;
  std::string mask_file;
  auto* region = app.add_subcommand("filter-region", "Rank clusters by region match");
  region->add_option("dataset", dataset)->required();
  region->add_option("--mask", region_opts.mask_name, "Region mask name from the manifest");
  region->add_option("--mask-file", mask_file, "Region mask file (dims [H,W])");
  region->add_option("--top-k", region_opts.top_k, "Clusters to return")->check(CLI::PositiveNumber);
  region->add_option("--out", out, "Output directory (default: dataset)");

  CheckOptions check_opts;
  auto* check = app.add_subcommand("check", "Fuzz monotonicity and diminishing returns");
  check->add_option("dataset", dataset)->required();
  AddSelectionFlags(check, select_opts, select_layers);
  check->add_option("--trials", check_opts.trials, "Random chains")->check(CLI::PositiveNumber);
  check->add_option("--seed", check_opts.seed, "Sampling seed");
  check->add_option("--out", out, "Output directory (default: dataset)");

  auto* report = app.add_subcommand("report", "Summarize a dataset and its artifacts");
  report->add_option("dataset", dataset)->required();
  report->add_option("--out", out, "Output directory (default: dataset)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (out.empty() && !dataset.empty()) out = dataset;
    const fs::path dir = dataset;
    threads = ResolveThreads(threads);

    if (*synth) {
      const auto dims = ParseIntList(std::string(size).replace(size.find('x') == std::string::npos
                                                                   ? size.size()
                                                                   : size.find('x'),
                                                               1, ","));
      if (dims.size() != 2) throw ValidationError("--size expects HxW");
      spec.height = dims[0];
      spec.width = dims[1];
      if (!profile.empty()) spec.reward_profile = ParseDoubleList(profile);
      SynthStage(spec, out);
      std::cout << "wrote " << spec.clusters * spec.per_cluster << " channels to " << out.string()
                << "\n";
    } else if (*sigs) {
      WindowSpec window = window_kind == "uniform" ? WindowSpec::Uniform(window_size ? window_size : 7)
                                                   : WindowSpec::Gaussian(window_size ? window_size : 11, sigma);
      if (window_kind != "uniform" && window_kind != "gaussian") {
        throw ValidationError("--window must be gaussian or uniform");
      }
      SignaturesStage(dir, window, threads);
    } else if (*dists) {
      DistancesStage(dir, concat ? SignatureMode::kConcatenated : SignatureMode::kPerCode,
                     threads, csv);
    } else if (*cluster) {
      cluster_opts.linkage = ParseLinkage(linkage);
      if (!cluster_layers.empty()) cluster_opts.layers = ParseIntList(cluster_layers);
      const Clustering cl = ClusterStage(dir, cluster_opts);
      std::cout << "K=" << cl.num_clusters() << "\n";
    } else if (*rewards) {
      if (!import_file.empty()) reward_opts.import_file = import_file;
      reward_opts.threads = threads;
      RewardsStage(dir, reward_opts);
    } else if (*select) {
      if (!select_layers.empty()) select_opts.layers = ParseIntList(select_layers);
      const Selection s = SelectStage(dir, select_opts);
      const Manifest manifest = ReadManifest(dir);
      WriteSelection(s, manifest, out);
      WriteRunManifest(out, "select", SelectOptionsJson(select_opts));
      std::cout << "objective=" << FormatDouble(s.result.objective())
                << " distinct_clusters=" << s.distinct_clusters << "\n";
    } else if (*sweep) {
      if (!select_layers.empty()) select_opts.layers = ParseIntList(select_layers);
      select_opts.solver = "lazy";
      for (const auto& [lambda, count] : SweepStage(dir, ParseDoubleList(lambdas), select_opts, out)) {
        std::cout << FormatDouble(lambda) << "," << count << "\n";
      }
    } else if (*region) {
      if (!mask_file.empty()) region_opts.mask_file = mask_file;
      if (region_opts.mask_name.empty() && !region_opts.mask_file) {
        throw ValidationError("filter-region needs --mask or --mask-file");
      }
      for (const auto& r : FilterRegionStage(dir, region_opts, out)) {
        std::cout << r.cluster << "," << FormatDouble(r.score) << "\n";
      }
    } else if (*check) {
      if (!select_layers.empty()) check_opts.layers = ParseIntList(select_layers);
      check_opts.lambda = select_opts.lambda;
      check_opts.normalize = select_opts.normalize;
      const PropertyReport r = CheckStage(dir, check_opts, out);
      std::cout << ToJson(r).dump() << "\n";
      if (!r.ok()) {
        std::cerr << "error: objective violated monotonicity or diminishing returns\n";
        return 2;
      }
    } else if (*report) {
      std::cout << ReportStage(dir, out);
    }
    return 0;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace stylecover
