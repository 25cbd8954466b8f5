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

#include "stylecover/interchange.h"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <string>

namespace stylecover {
namespace fs = std::filesystem;

namespace {

constexpr const char kMapConvention[] = "ssim_difference_unit_interval";

void PutU32(std::vector<uint8_t>& out, uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<uint8_t>(v >> shift));
}

uint32_t GetU32(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

// Product of dims, or nullopt on overflow past 2^62.
std::optional<uint64_t> CheckedProduct(std::span<const uint32_t> dims) {
  uint64_t product = 1;
  for (uint32_t d : dims) {
    if (d != 0 && product > (uint64_t{1} << 62) / d) return std::nullopt;
    product *= d;
  }
  return product;
}

void CheckShape(std::span<const uint32_t> dims) {
  if (dims.empty() || dims.size() > kMaxRank) {
    throw ValidationError("invalid rank " + std::to_string(dims.size()));
  }
  for (uint32_t d : dims) {
    if (d == 0 && dims.size() != 1) {
      throw ValidationError("invalid dims: zero extent allowed only as rank-1 [0]");
    }
  }
}

std::string ShapeString(std::span<const uint32_t> dims) {
  std::string s = "[";
  for (size_t i = 0; i < dims.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(dims[i]);
  }
  return s + "]";
}

void ExpectDims(const Matrix& m, std::span<const uint32_t> expected, const std::string& what) {
  if (!std::equal(m.dims.begin(), m.dims.end(), expected.begin(), expected.end())) {
    throw ValidationError("manifest/payload dimension disagreement in " + what + ": file has " +
                          ShapeString(m.dims) + ", manifest implies " +
                          ShapeString(expected));
  }
}

std::vector<uint8_t> ReadFileBytes(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ValidationError("missing artifact: " + file.string());
  std::error_code ec;
  const auto size = fs::file_size(file, ec);
  if (ec) throw IoError("cannot stat " + file.string() + ": " + ec.message());
  std::vector<uint8_t> bytes(size);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size));
  if (static_cast<uintmax_t>(in.gcount()) != size) throw IoError("read failed: " + file.string());
  return bytes;
}

void WriteFileBytes(const fs::path& file, std::span<const uint8_t> bytes) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + file.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + file.string());
}

template <typename T>
T Required(const nlohmann::json& json, const char* key) {
  auto it = json.find(key);
  if (it == json.end()) throw ValidationError(std::string("manifest missing key '") + key + "'");
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("manifest key '") + key + "' has wrong type: " + e.what());
  }
}

}  // namespace

size_t Matrix::ElementCount() const {
  size_t n = 1;
  for (uint32_t d : dims) n *= d;
  return dims.empty() ? 0 : n;
}

std::vector<uint8_t> EncodeMatrix(std::span<const uint32_t> dims,
                                  std::span<const float> values) {
  CheckShape(dims);
  const auto count = CheckedProduct(dims);
  if (!count || *count != values.size()) {
    throw ValidationError("dimension mismatch: dims " + ShapeString(dims) + " vs " +
                          std::to_string(values.size()) + " values");
  }
  std::vector<uint8_t> out;
  out.reserve(8 + 4 * dims.size() + 4 * values.size());
  out.insert(out.end(), std::begin(kMatrixMagic), std::end(kMatrixMagic));
  PutU32(out, static_cast<uint32_t>(dims.size()));
  for (uint32_t d : dims) PutU32(out, d);
  for (float v : values) {
    if (!std::isfinite(v)) throw ValidationError("non-finite value");
    PutU32(out, std::bit_cast<uint32_t>(v));
  }
  return out;
}

Matrix DecodeMatrix(std::span<const uint8_t> bytes) {
  if (bytes.size() < 4) throw ValidationError("truncated header");
  if (std::memcmp(bytes.data(), kMatrixMagic, 4) != 0) throw ValidationError("bad magic");
  if (bytes.size() < 8) throw ValidationError("truncated header");
  const uint32_t rank = GetU32(bytes.data() + 4);
  if (rank == 0 || rank > kMaxRank) throw ValidationError("invalid rank " + std::to_string(rank));
  const size_t header = 8 + 4 * static_cast<size_t>(rank);
  if (bytes.size() < header) throw ValidationError("truncated header");

  Matrix m;
  m.dims.resize(rank);
  for (uint32_t r = 0; r < rank; ++r) m.dims[r] = GetU32(bytes.data() + 8 + 4 * r);
  CheckShape(m.dims);

  const auto count = CheckedProduct(m.dims);
  const uint64_t payload = bytes.size() - header;
  if (!count || *count > payload / 4) throw ValidationError("truncated payload");
  if (*count * 4 < payload) throw ValidationError("trailing bytes after payload");

  m.values.resize(*count);
  const uint8_t* p = bytes.data() + header;
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(m.values.data(), p, *count * 4);
  } else {
    for (uint64_t i = 0; i < *count; ++i) m.values[i] = std::bit_cast<float>(GetU32(p + 4 * i));
  }
  for (uint64_t i = 0; i < *count; ++i) {
    if (!std::isfinite(m.values[i])) {
      throw ValidationError("non-finite value at index " + std::to_string(i));
    }
  }
  return m;
}

fs::path WriteMatrix(std::span<const uint32_t> dims, std::span<const float> values,
                     const fs::path& file) {
  WriteFileBytes(file, EncodeMatrix(dims, values));
  return file;
}

Matrix ReadMatrix(const fs::path& file) {
  const auto bytes = ReadFileBytes(file);
  try {
    return DecodeMatrix(bytes);
  } catch (const ValidationError& e) {
    throw ValidationError(file.filename().string() + ": " + e.what());
  }
}

void WriteMatrixCsv(const Matrix& matrix, const fs::path& file) {
  CheckShape(matrix.dims);
  if (matrix.values.size() != matrix.ElementCount()) throw ValidationError("dimension mismatch");
  if (matrix.values.size() > kCsvMaxValues) {
    throw ValidationError("csv mirror limited to " + std::to_string(kCsvMaxValues) + " values");
  }
  std::ostringstream out;
  out << "dims";
  for (uint32_t d : matrix.dims) out << ',' << d;
  out << '\n';
  const size_t row = matrix.dims.back() == 0 ? 1 : matrix.dims.back();
  char buf[32];
  for (size_t i = 0; i < matrix.values.size(); ++i) {
    if (!std::isfinite(matrix.values[i])) throw ValidationError("non-finite value");
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), matrix.values[i]);
    out << std::string_view(buf, end - buf);
    out << ((i + 1) % row == 0 ? '\n' : ',');
  }
  const std::string text = out.str();
  WriteFileBytes(file, {reinterpret_cast<const uint8_t*>(text.data()), text.size()});
}

Matrix ReadMatrixCsv(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw ValidationError("missing artifact: " + file.string());
  std::string line;
  if (!std::getline(in, line) || !line.starts_with("dims")) {
    throw ValidationError("csv mirror: missing dims header");
  }
  Matrix m;
  std::stringstream header(line.substr(4));
  std::string cell;
  while (std::getline(header, cell, ',')) {
    if (cell.empty()) continue;
    uint32_t d = 0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), d);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
      throw ValidationError("csv mirror: bad dims header");
    }
    m.dims.push_back(d);
  }
  CheckShape(m.dims);
  while (std::getline(in, line)) {
    std::stringstream row(line);
    while (std::getline(row, cell, ',')) {
      float v = 0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        throw ValidationError("csv mirror: bad value '" + cell + "'");
      }
      m.values.push_back(v);
    }
  }
  if (m.values.size() != m.ElementCount()) throw ValidationError("csv mirror: truncated payload");
  return m;
}

void Manifest::Validate() const {
  if (format_version != kFormatVersion) {
    throw ValidationError("unsupported format_version " + std::to_string(format_version));
  }
  if (num_channels < 1) throw ValidationError("num_channels must be >= 1");
  if (static_cast<size_t>(num_channels) != channels.size()) {
    throw ValidationError("num_channels (" + std::to_string(num_channels) +
                          ") differs from channel list length (" +
                          std::to_string(channels.size()) + ")");
  }
  if (num_codes < 1) throw ValidationError("num_codes must be >= 1");
  if (map_height < 1 || map_width < 1) throw ValidationError("map dimensions must be >= 1");
  std::set<ChannelRef> seen;
  for (const auto& c : channels) {
    if (!seen.insert(c).second) throw ValidationError("duplicate channel " + ToString(c));
  }
  if (!std::isfinite(alpha) || !std::isfinite(truncation)) {
    throw ValidationError("alpha and truncation must be finite");
  }
  std::set<std::string> names;
  for (const auto& mask : region_masks) {
    if (mask.name.empty() || mask.file.empty()) throw ValidationError("region mask needs name and file");
    if (!names.insert(mask.name).second) throw ValidationError("duplicate region mask " + mask.name);
  }
}

nlohmann::json Manifest::ToJson() const {
  nlohmann::json j;
  j["format_version"] = format_version;
  j["num_channels"] = num_channels;
  j["num_codes"] = num_codes;
  j["map_height"] = map_height;
  j["map_width"] = map_width;
  j["map_convention"] = kMapConvention;
  auto& chans = j["channels"] = nlohmann::json::array();
  for (const auto& c : channels) chans.push_back({{"layer", c.layer}, {"channel", c.channel}});
  j["alpha"] = alpha;
  j["truncation"] = truncation;
  j["provenance"] = provenance;
  if (!region_masks.empty()) {
    auto& masks = j["region_masks"] = nlohmann::json::array();
    for (const auto& m : region_masks) masks.push_back({{"name", m.name}, {"file", m.file}});
  }
  if (!excluded_layers.empty()) j["excluded_layers"] = excluded_layers;
  return j;
}

Manifest Manifest::FromJson(const nlohmann::json& json) {
  if (!json.is_object()) throw ValidationError("manifest must be a JSON object");
  Manifest m;
  m.format_version = Required<int>(json, "format_version");
  m.num_channels = Required<int>(json, "num_channels");
  m.num_codes = Required<int>(json, "num_codes");
  m.map_height = Required<int>(json, "map_height");
  m.map_width = Required<int>(json, "map_width");
  if (auto it = json.find("map_convention"); it != json.end() && *it != kMapConvention) {
    throw ValidationError("unsupported map_convention " + it->dump());
  }
  const auto chans = Required<nlohmann::json>(json, "channels");
  if (!chans.is_array()) throw ValidationError("manifest key 'channels' must be an array");
  for (const auto& c : chans) {
    ChannelRef ref;
    ref.layer = Required<int32_t>(c, "layer");
    ref.channel = Required<int32_t>(c, "channel");
    m.channels.push_back(ref);
  }
  m.alpha = json.value("alpha", m.alpha);
  m.truncation = json.value("truncation", m.truncation);
  m.provenance = json.value("provenance", std::string());
  if (auto it = json.find("region_masks"); it != json.end()) {
    for (const auto& entry : *it) {
      m.region_masks.push_back({Required<std::string>(entry, "name"),
                                Required<std::string>(entry, "file")});
    }
  }
  if (auto it = json.find("excluded_layers"); it != json.end()) {
    m.excluded_layers = it->get<std::vector<int>>();
  }
  m.Validate();
  return m;
}

void WriteJsonFile(const nlohmann::json& json, const fs::path& file) {
  const std::string text = json.dump(2) + "\n";
  WriteFileBytes(file, {reinterpret_cast<const uint8_t*>(text.data()), text.size()});
}

nlohmann::json ReadJsonFile(const fs::path& file) {
  const auto bytes = ReadFileBytes(file);
  try {
    return nlohmann::json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(file.filename().string() + ": malformed JSON: " + e.what());
  }
}

void WriteManifest(const Manifest& manifest, const fs::path& dir) {
  manifest.Validate();
  WriteJsonFile(manifest.ToJson(), dir / kManifestFile);
}

Manifest ReadManifest(const fs::path& dir) {
  try {
    return Manifest::FromJson(ReadJsonFile(dir / kManifestFile));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("manifest.json: ") + e.what());
  }
}

void WriteSignatures(const Manifest& manifest, std::span<const ChannelSignature> signatures,
                     const fs::path& dir) {
  manifest.Validate();
  if (signatures.size() != static_cast<size_t>(manifest.num_channels)) {
    throw ValidationError("dimension mismatch: " + std::to_string(signatures.size()) +
                          " signatures for " + std::to_string(manifest.num_channels) +
                          " channels");
  }
  const size_t per_channel = static_cast<size_t>(manifest.num_codes) * manifest.map_size();
  std::vector<float> payload;
  payload.reserve(per_channel * signatures.size());
  for (size_t i = 0; i < signatures.size(); ++i) {
    const auto& s = signatures[i];
    if (s.channel != manifest.channels[i]) {
      throw ValidationError("signature " + std::to_string(i) + " is for " + ToString(s.channel) +
                            ", manifest lists " + ToString(manifest.channels[i]));
    }
    if (s.num_codes != manifest.num_codes || s.map_size != manifest.map_size()) {
      throw ValidationError("dimension mismatch in signature " + std::to_string(i));
    }
    s.Validate();
    payload.insert(payload.end(), s.values.begin(), s.values.end());
  }
  const uint32_t dims[] = {static_cast<uint32_t>(manifest.num_channels),
                           static_cast<uint32_t>(manifest.num_codes),
                           static_cast<uint32_t>(manifest.map_size())};
  WriteMatrix(dims, payload, dir / kSignaturesFile);
}

std::vector<ChannelSignature> ReadSignatures(const Manifest& manifest, const fs::path& dir) {
  const Matrix m = ReadMatrix(dir / kSignaturesFile);
  const uint32_t dims[] = {static_cast<uint32_t>(manifest.num_channels),
                           static_cast<uint32_t>(manifest.num_codes),
                           static_cast<uint32_t>(manifest.map_size())};
  ExpectDims(m, dims, kSignaturesFile);
  const size_t per_channel = static_cast<size_t>(dims[1]) * dims[2];
  std::vector<ChannelSignature> out(manifest.num_channels);
  for (size_t i = 0; i < out.size(); ++i) {
    auto& s = out[i];
    s.channel = manifest.channels[i];
    s.num_codes = manifest.num_codes;
    s.map_size = manifest.map_size();
    s.values.assign(m.values.begin() + i * per_channel, m.values.begin() + (i + 1) * per_channel);
    s.Validate();
  }
  return out;
}

void WriteRewards(const Manifest& manifest, std::span<const float> rewards, const fs::path& dir) {
  if (rewards.size() != static_cast<size_t>(manifest.num_channels)) {
    throw ValidationError("dimension mismatch: " + std::to_string(rewards.size()) +
                          " rewards for " + std::to_string(manifest.num_channels) + " channels");
  }
  for (float r : rewards) {
    if (!std::isfinite(r)) throw ValidationError("non-finite value");
    if (r < 0) throw ValidationError("negative reward");
  }
  const uint32_t dims[] = {static_cast<uint32_t>(rewards.size())};
  WriteMatrix(dims, rewards, dir / kRewardsFile);
}

std::optional<std::vector<float>> ReadRewards(const Manifest& manifest, const fs::path& dir) {
  if (!fs::exists(dir / kRewardsFile)) return std::nullopt;
  Matrix m = ReadMatrix(dir / kRewardsFile);
  const uint32_t dims[] = {static_cast<uint32_t>(manifest.num_channels)};
  ExpectDims(m, dims, kRewardsFile);
  for (float r : m.values) {
    if (r < 0) throw ValidationError("negative reward");
  }
  return std::move(m.values);
}

fs::path WriteDataset(const Manifest& manifest, std::span<const ChannelSignature> signatures,
                      const std::optional<std::vector<float>>& rewards, const fs::path& dir) {
  manifest.Validate();
  // Validate everything before touching the directory.
  if (rewards) {
    if (rewards->size() != static_cast<size_t>(manifest.num_channels)) {
      throw ValidationError("dimension mismatch: rewards length");
    }
    for (float r : *rewards) {
      if (!std::isfinite(r)) throw ValidationError("non-finite value");
      if (r < 0) throw ValidationError("negative reward");
    }
  }
  for (const auto& s : signatures) s.Validate();

  fs::create_directories(dir);
  WriteSignatures(manifest, signatures, dir);
  if (rewards) {
    WriteRewards(manifest, *rewards, dir);
  } else {
    fs::remove(dir / kRewardsFile);
  }
  WriteManifest(manifest, dir);
  return dir;
}

Dataset ReadDataset(const fs::path& dir) {
  Dataset d;
  d.manifest = ReadManifest(dir);
  d.signatures = ReadSignatures(d.manifest, dir);
  d.rewards = ReadRewards(d.manifest, dir);
  return d;
}

}  // namespace stylecover
