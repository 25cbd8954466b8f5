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

#ifndef STYLECOVER_SIGNATURES_H_
#define STYLECOVER_SIGNATURES_H_

#include <span>
#include <vector>

#include "stylecover/interchange.h"
#include "stylecover/types.h"

namespace stylecover {

enum class MatrixKind { kDistance, kSimilarity };

// Dense symmetric |V| x |V| matrix. Distance kind: zero diagonal, entries in
// [0, 2]. Similarity kind: unit diagonal, entries in [-1, 1].
class PairwiseMatrix {
 public:
  PairwiseMatrix() = default;
  PairwiseMatrix(int size, MatrixKind kind);

  int size() const { return size_; }
  MatrixKind kind() const { return kind_; }

  double operator()(int i, int j) const { return data_[static_cast<size_t>(i) * size_ + j]; }
  std::span<const double> Row(int i) const {
    return {data_.data() + static_cast<size_t>(i) * size_, static_cast<size_t>(size_)};
  }
  std::span<const double> data() const { return data_; }

  // Writes both (i, j) and (j, i).
  void Set(int i, int j, double value) {
    data_[static_cast<size_t>(i) * size_ + j] = value;
    data_[static_cast<size_t>(j) * size_ + i] = value;
  }

  // Throws ValidationError on asymmetry, a bad diagonal, or out-of-range entries.
  void Validate() const;

  // Principal submatrix over `indices` (in the given order).
  PairwiseMatrix Subset(std::span<const int> indices) const;

  // binary32 cache form with dims [V, V]; reading re-validates.
  Matrix ToMatrix() const;
  static PairwiseMatrix FromMatrix(const Matrix& m, MatrixKind kind);

 private:
  int size_ = 0;
  MatrixKind kind_ = MatrixKind::kDistance;
  std::vector<double> data_;
};

// Cosine similarity clamped to [-1, 1]. Both vectors zero -> 1; exactly one
// zero -> 0. Throws ValidationError on length mismatch.
double CosineSimilarity(std::span<const float> u, std::span<const float> v);

// 1 - CosineSimilarity, so both-zero -> 0 and one-zero -> 1.
double CosineDistance(std::span<const float> u, std::span<const float> v);

enum class SignatureMode {
  kPerCode,        // cosine per style code, averaged over the M codes
  kConcatenated,   // one cosine over all M maps laid end to end (ablation)
};

double ChannelDistance(const ChannelSignature& a, const ChannelSignature& b,
                       SignatureMode mode = SignatureMode::kPerCode);
double ChannelSimilarity(const ChannelSignature& a, const ChannelSignature& b,
                         SignatureMode mode = SignatureMode::kPerCode);

struct SignatureMatrices {
  PairwiseMatrix distance;
  PairwiseMatrix similarity;
};

struct BuildOptions {
  SignatureMode mode = SignatureMode::kPerCode;
  int threads = 1;
};

// Every entry is computed wholly inside one task from the same kernels as
// ChannelDistance/ChannelSimilarity, so output does not depend on threads.
SignatureMatrices BuildMatrices(std::span<const ChannelSignature> signatures,
                                const BuildOptions& options = {});

}  // namespace stylecover

#endif  // STYLECOVER_SIGNATURES_H_
