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

#include <atomic>
#include <cassert>
#include <cstdlib>
#include <string_view>

#include "stylecover/simd/kernels.h"

namespace stylecover::simd {
namespace {

bool CpuHasAvx2() {
#if defined(STYLECOVER_HAS_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend InitialBackend() {
  if (const char* env = std::getenv("SCX_SIMD")) {
    const std::string_view requested(env);
    if (requested == "scalar") return Backend::kScalar;
    if (requested == "avx2" && CpuHasAvx2()) return Backend::kAvx2;
  }
  return CpuHasAvx2() ? Backend::kAvx2 : Backend::kScalar;
}

std::atomic<Backend>& ActiveSlot() {
  static std::atomic<Backend> active{InitialBackend()};
  return active;
}

}  // namespace

std::string_view BackendName(Backend backend) {
  switch (backend) {
    case Backend::kScalar:
      return "scalar";
    case Backend::kAvx2:
      return "avx2";
  }
  return "unknown";
}

bool BackendAvailable(Backend backend) {
  return backend == Backend::kScalar || CpuHasAvx2();
}

Backend ActiveBackend() { return ActiveSlot().load(std::memory_order_relaxed); }

bool SetBackend(Backend backend) {
  if (!BackendAvailable(backend)) return false;
  ActiveSlot().store(backend, std::memory_order_relaxed);
  return true;
}

double Dot(std::span<const float> a, std::span<const float> b) {
  assert(a.size() == b.size());
#ifdef STYLECOVER_HAS_AVX2
  if (ActiveBackend() == Backend::kAvx2) return avx2::Dot(a.data(), b.data(), a.size());
#endif
  return scalar::Dot(a.data(), b.data(), a.size());
}

double SumSquares(std::span<const float> a) {
#ifdef STYLECOVER_HAS_AVX2
  if (ActiveBackend() == Backend::kAvx2) return avx2::SumSquares(a.data(), a.size());
#endif
  return scalar::SumSquares(a.data(), a.size());
}

void Axpy(std::span<double> dst, std::span<const double> src, double weight) {
  assert(dst.size() == src.size());
#ifdef STYLECOVER_HAS_AVX2
  if (ActiveBackend() == Backend::kAvx2) {
    avx2::Axpy(dst.data(), src.data(), weight, dst.size());
    return;
  }
#endif
  scalar::Axpy(dst.data(), src.data(), weight, dst.size());
}

void Multiply(std::span<double> dst, std::span<const double> a,
              std::span<const double> b) {
  assert(dst.size() == a.size() && a.size() == b.size());
#ifdef STYLECOVER_HAS_AVX2
  if (ActiveBackend() == Backend::kAvx2) {
    avx2::Multiply(dst.data(), a.data(), b.data(), dst.size());
    return;
  }
#endif
  scalar::Multiply(dst.data(), a.data(), b.data(), dst.size());
}

}  // namespace stylecover::simd
