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

#include "stylecover/signatures.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "stylecover/parallel.h"
#include "stylecover/simd/kernels.h"

namespace stylecover {
namespace {

double CosineFromParts(double dot, double norm_sq_u, double norm_sq_v) {
  const bool zero_u = norm_sq_u == 0.0;
  const bool zero_v = norm_sq_v == 0.0;
  if (zero_u && zero_v) return 1.0;
  if (zero_u || zero_v) return 0.0;
  return std::clamp(dot / std::sqrt(norm_sq_u * norm_sq_v), -1.0, 1.0);
}

void CheckCompatible(const ChannelSignature& a, const ChannelSignature& b) {
  if (a.num_codes != b.num_codes || a.map_size != b.map_size) {
    throw ValidationError("signature shape mismatch: " + ToString(a.channel) + " vs " +
                          ToString(b.channel));
  }
  if (a.values.size() != static_cast<size_t>(a.num_codes) * a.map_size ||
      b.values.size() != static_cast<size_t>(b.num_codes) * b.map_size) {
    throw ValidationError("signature payload does not match its shape");
  }
}

// Per-code cosines between a and b, given precomputed squared norms.
template <typename Fn>
void ForEachCodeCosine(const ChannelSignature& a, const ChannelSignature& b,
                       std::span<const double> norms_a, std::span<const double> norms_b,
                       Fn&& fn) {
  for (int m = 0; m < a.num_codes; ++m) {
    fn(CosineFromParts(simd::Dot(a.Map(m), b.Map(m)), norms_a[m], norms_b[m]));
  }
}

std::vector<double> CodeNorms(const ChannelSignature& s) {
  std::vector<double> norms(s.num_codes);
  for (int m = 0; m < s.num_codes; ++m) norms[m] = simd::SumSquares(s.Map(m));
  return norms;
}

struct PairValues {
  double distance;
  double similarity;
};

PairValues PerCodePair(const ChannelSignature& a, const ChannelSignature& b,
                       std::span<const double> norms_a, std::span<const double> norms_b) {
  double dist_sum = 0.0;
  double sim_sum = 0.0;
  ForEachCodeCosine(a, b, norms_a, norms_b, [&](double c) {
    dist_sum += 1.0 - c;
    sim_sum += c;
  });
  const double m = a.num_codes;
  return {dist_sum / m, sim_sum / m};
}

PairValues ConcatenatedPair(const ChannelSignature& a, const ChannelSignature& b,
                            double norm_a, double norm_b) {
  const double c = CosineFromParts(simd::Dot(a.values, b.values), norm_a, norm_b);
  return {1.0 - c, c};
}

PairValues ComputePair(const ChannelSignature& a, const ChannelSignature& b,
                       SignatureMode mode) {
  CheckCompatible(a, b);
  if (mode == SignatureMode::kConcatenated) {
    return ConcatenatedPair(a, b, simd::SumSquares(a.values), simd::SumSquares(b.values));
  }
  return PerCodePair(a, b, CodeNorms(a), CodeNorms(b));
}

}  // namespace

std::string ToString(const ChannelRef& ref) {
  return "L" + std::to_string(ref.layer) + "/c" + std::to_string(ref.channel);
}

void ChannelSignature::Validate() const {
  if (num_codes < 1 || map_size < 1) throw ValidationError("signature needs M >= 1 and H*W >= 1");
  if (values.size() != static_cast<size_t>(num_codes) * map_size) {
    throw ValidationError("dimension mismatch: signature " + ToString(channel) + " holds " +
                          std::to_string(values.size()) + " values, expected " +
                          std::to_string(static_cast<size_t>(num_codes) * map_size));
  }
  for (float v : values) {
    if (!std::isfinite(v)) throw ValidationError("non-finite value in signature " + ToString(channel));
    if (v < 0.0f || v > 1.0f) {
      throw ValidationError("value out of [0,1] in signature " + ToString(channel));
    }
  }
}

PairwiseMatrix::PairwiseMatrix(int size, MatrixKind kind)
    : size_(size), kind_(kind), data_(static_cast<size_t>(size) * size, 0.0) {
  if (kind == MatrixKind::kSimilarity) {
    for (int i = 0; i < size; ++i) data_[static_cast<size_t>(i) * size + i] = 1.0;
  }
}

void PairwiseMatrix::Validate() const {
  if (size_ < 1 || data_.size() != static_cast<size_t>(size_) * size_) {
    throw ValidationError("pairwise matrix has invalid shape");
  }
  const bool distance = kind_ == MatrixKind::kDistance;
  const double lo = distance ? 0.0 : -1.0;
  const double hi = distance ? 2.0 : 1.0;
  const double diag = distance ? 0.0 : 1.0;
  for (int i = 0; i < size_; ++i) {
    if ((*this)(i, i) != diag) {
      throw ValidationError(std::string(distance ? "distance" : "similarity") +
                            " matrix diagonal must be " + (distance ? "0" : "1"));
    }
  }
  // Upper triangle, visited in square tiles.
  constexpr int kTile = 64;
  for (int i0 = 0; i0 < size_; i0 += kTile) {
    for (int j0 = i0; j0 < size_; j0 += kTile) {
      const int i1 = std::min(i0 + kTile, size_);
      const int j1 = std::min(j0 + kTile, size_);
      for (int i = i0; i < i1; ++i) {
        for (int j = std::max(j0, i + 1); j < j1; ++j) {
          const double v = (*this)(i, j);
          if (v != (*this)(j, i)) throw ValidationError("pairwise matrix is not symmetric");
          if (!std::isfinite(v) || v < lo || v > hi) {
            throw ValidationError("pairwise matrix entry out of range at (" + std::to_string(i) +
                                  "," + std::to_string(j) + ")");
          }
        }
      }
    }
  }
}

PairwiseMatrix PairwiseMatrix::Subset(std::span<const int> indices) const {
  PairwiseMatrix out(static_cast<int>(indices.size()), kind_);
  for (size_t a = 0; a < indices.size(); ++a) {
    if (indices[a] < 0 || indices[a] >= size_) throw ValidationError("subset index out of range");
    for (size_t b = 0; b < indices.size(); ++b) {
      out.data_[a * indices.size() + b] = (*this)(indices[a], indices[b]);
    }
  }
  return out;
}

Matrix PairwiseMatrix::ToMatrix() const {
  Matrix m;
  m.dims = {static_cast<uint32_t>(size_), static_cast<uint32_t>(size_)};
  m.values.assign(data_.begin(), data_.end());
  return m;
}

PairwiseMatrix PairwiseMatrix::FromMatrix(const Matrix& m, MatrixKind kind) {
  if (m.dims.size() != 2 || m.dims[0] != m.dims[1] || m.dims[0] == 0) {
    throw ValidationError("pairwise matrix file must have dims [V,V]");
  }
  PairwiseMatrix out(static_cast<int>(m.dims[0]), kind);
  out.data_.assign(m.values.begin(), m.values.end());
  out.Validate();
  return out;
}

double CosineSimilarity(std::span<const float> u, std::span<const float> v) {
  if (u.size() != v.size()) throw ValidationError("length mismatch in cosine");
  return CosineFromParts(simd::Dot(u, v), simd::SumSquares(u), simd::SumSquares(v));
}

double CosineDistance(std::span<const float> u, std::span<const float> v) {
  return 1.0 - CosineSimilarity(u, v);
}

double ChannelDistance(const ChannelSignature& a, const ChannelSignature& b, SignatureMode mode) {
  return ComputePair(a, b, mode).distance;
}

double ChannelSimilarity(const ChannelSignature& a, const ChannelSignature& b,
                         SignatureMode mode) {
  return ComputePair(a, b, mode).similarity;
}

SignatureMatrices BuildMatrices(std::span<const ChannelSignature> signatures,
                                const BuildOptions& options) {
  if (signatures.size() < 2) throw ValidationError("need at least 2 signatures");
  for (const auto& s : signatures) {
    CheckCompatible(signatures.front(), s);
  }
  const int n = static_cast<int>(signatures.size());
  const int threads = ResolveThreads(options.threads);

  // Squared norms: per code, or of the whole concatenation.
  std::vector<std::vector<double>> norms(n);
  ParallelFor(n, threads, [&](size_t i) {
    norms[i] = options.mode == SignatureMode::kPerCode
                   ? CodeNorms(signatures[i])
                   : std::vector<double>{simd::SumSquares(signatures[i].values)};
  });

  SignatureMatrices out{PairwiseMatrix(n, MatrixKind::kDistance),
                        PairwiseMatrix(n, MatrixKind::kSimilarity)};
  ParallelFor(n, threads, [&](size_t row) {
    const int i = static_cast<int>(row);
    for (int j = i + 1; j < n; ++j) {
      const PairValues p =
          options.mode == SignatureMode::kPerCode
              ? PerCodePair(signatures[i], signatures[j], norms[i], norms[j])
              : ConcatenatedPair(signatures[i], signatures[j], norms[i][0], norms[j][0]);
      out.distance.Set(i, j, p.distance);
      out.similarity.Set(i, j, p.similarity);
    }
  });
  return out;
}

}  // namespace stylecover
