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

#include "stylecover/simd/kernels.h"

namespace stylecover::simd::scalar {

double Dot(const float* a, const float* b, size_t n) {
  double sum = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sum += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return sum;
}

double SumSquares(const float* a, size_t n) {
  double sum = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double x = a[i];
    sum += x * x;
  }
  return sum;
}

void Axpy(double* dst, const double* src, double weight, size_t n) {
  for (size_t i = 0; i < n; ++i) dst[i] += weight * src[i];
}

void Multiply(double* dst, const double* a, const double* b, size_t n) {
  for (size_t i = 0; i < n; ++i) dst[i] = a[i] * b[i];
}

}  // namespace stylecover::simd::scalar
