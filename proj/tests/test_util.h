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

#ifndef STYLECOVER_TESTS_TEST_UTIL_H_
#define STYLECOVER_TESTS_TEST_UTIL_H_

#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "stylecover/interchange.h"
#include "stylecover/types.h"

namespace stylecover::testing {

// Fresh directory under the system temp path, removed on destruction.
class ScopedDir {
 public:
  explicit ScopedDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("stylecover_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~ScopedDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScopedDir(const ScopedDir&) = delete;
  ScopedDir& operator=(const ScopedDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::vector<uint8_t> ReadBytes(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::string ReadText(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void WriteBytes(const std::vector<uint8_t>& bytes, const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

struct RandomDataset {
  Manifest manifest;
  std::vector<ChannelSignature> signatures;
  std::vector<float> rewards;
};

inline RandomDataset MakeRandomDataset(uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  std::uniform_real_distribution<float> unit(0.0f, 1.0f);
  RandomDataset d;
  Manifest& m = d.manifest;
  m.num_channels = pick(2, 12);
  m.num_codes = pick(1, 4);
  m.map_height = pick(1, 9);
  m.map_width = pick(1, 9);
  m.alpha = unit(rng) * 40.0;
  m.truncation = unit(rng);
  m.provenance = "random " + std::to_string(seed);
  const int layers = pick(1, 3);
  for (int i = 0; i < m.num_channels; ++i) m.channels.push_back({i % layers, i / layers});
  for (int i = 0; i < m.num_channels; ++i) {
    ChannelSignature s;
    s.channel = m.channels[i];
    s.num_codes = m.num_codes;
    s.map_size = m.map_size();
    s.values.resize(static_cast<size_t>(s.num_codes) * s.map_size);
    for (float& v : s.values) v = unit(rng);
    d.signatures.push_back(std::move(s));
    d.rewards.push_back(unit(rng) * 5.0f);
  }
  return d;
}

}  // namespace stylecover::testing

#endif  // STYLECOVER_TESTS_TEST_UTIL_H_
