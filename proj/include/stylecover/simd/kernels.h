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

#ifndef STYLECOVER_SIMD_KERNELS_H_
#define STYLECOVER_SIMD_KERNELS_H_

#include <cstddef>
#include <span>
#include <string_view>

// Data-parallel inner loops. Every kernel has a scalar reference version and,
// on x86-64, an AVX2+FMA version. The variant is chosen once at startup from
// CPUID and can be forced with SCX_SIMD=scalar|avx2 or SetBackend().
//
// Products of binary32 inputs are exact in binary64, so the float kernels
// differ between variants only in the order of the double accumulation.

namespace stylecover::simd {

enum class Backend { kScalar, kAvx2 };

std::string_view BackendName(Backend backend);

// True when the running CPU (and this build) can execute `backend`.
bool BackendAvailable(Backend backend);

Backend ActiveBackend();

// Returns false (and leaves the active backend unchanged) when unavailable.
bool SetBackend(Backend backend);

// sum_i a[i] * b[i], accumulated in double. Spans must have equal size.
double Dot(std::span<const float> a, std::span<const float> b);

// sum_i a[i]^2, accumulated in double.
double SumSquares(std::span<const float> a);

// dst[i] += weight * src[i]. Spans must have equal size.
void Axpy(std::span<double> dst, std::span<const double> src, double weight);

// dst[i] = a[i] * b[i].
void Multiply(std::span<double> dst, std::span<const double> a,
              std::span<const double> b);

namespace scalar {
double Dot(const float* a, const float* b, size_t n);
double SumSquares(const float* a, size_t n);
void Axpy(double* dst, const double* src, double weight, size_t n);
void Multiply(double* dst, const double* a, const double* b, size_t n);
}  // namespace scalar

namespace avx2 {
double Dot(const float* a, const float* b, size_t n);
double SumSquares(const float* a, size_t n);
void Axpy(double* dst, const double* src, double weight, size_t n);
void Multiply(double* dst, const double* a, const double* b, size_t n);
}  // namespace avx2

}  // namespace stylecover::simd

#endif  // STYLECOVER_SIMD_KERNELS_H_
