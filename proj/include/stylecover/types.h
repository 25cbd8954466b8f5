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

#ifndef STYLECOVER_TYPES_H_
#define STYLECOVER_TYPES_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace stylecover {

// Input or artifact violates a documented invariant. The CLI maps this to
// exit code 2; every other exception is an internal error (exit code 1).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Filesystem failure while reading or writing an artifact.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Identity of one style channel: a ground-set element.
struct ChannelRef {
  int32_t layer = 0;
  int32_t channel = 0;

  friend auto operator<=>(const ChannelRef&, const ChannelRef&) = default;
};

std::string ToString(const ChannelRef& ref);

// M flattened difference maps for one channel, stored contiguously as
// values[m * map_size + p]. Values live in [0, 1].
struct ChannelSignature {
  ChannelRef channel;
  int num_codes = 0;
  int map_size = 0;
  std::vector<float> values;

  std::span<const float> Map(int code) const {
    return {values.data() + static_cast<size_t>(code) * map_size,
            static_cast<size_t>(map_size)};
  }
  std::span<float> MutableMap(int code) {
    return {values.data() + static_cast<size_t>(code) * map_size,
            static_cast<size_t>(map_size)};
  }

  // Throws ValidationError on shape mismatch or values outside [0, 1].
  void Validate() const;
};

}  // namespace stylecover

#endif  // STYLECOVER_TYPES_H_
