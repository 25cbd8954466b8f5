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

#include "stylecover/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "stylecover/simd/kernels.h"
#include "stylecover/types.h"

namespace stylecover {
namespace {

void CheckPair(const Image& a, const Image& b) {
  a.Validate();
  b.Validate();
  if (a.height != b.height || a.width != b.width) {
    throw ValidationError("dimension mismatch: " + std::to_string(a.height) + "x" +
                          std::to_string(a.width) + " vs " + std::to_string(b.height) + "x" +
                          std::to_string(b.width));
  }
}

// Valid-mode separable filter: (H - s + 1) x (W - s + 1) output.
std::vector<double> FilterValid(std::span<const double> plane, int height, int width,
                                std::span<const double> weights) {
  const int s = static_cast<int>(weights.size());
  const int out_h = height - s + 1;
  const int out_w = width - s + 1;

  std::vector<double> rows(static_cast<size_t>(height) * out_w, 0.0);
  for (int y = 0; y < height; ++y) {
    std::span<double> dst(rows.data() + static_cast<size_t>(y) * out_w, out_w);
    for (int k = 0; k < s; ++k) {
      simd::Axpy(dst, plane.subspan(static_cast<size_t>(y) * width + k, out_w), weights[k]);
    }
  }

  std::vector<double> out(static_cast<size_t>(out_h) * out_w, 0.0);
  for (int y = 0; y < out_h; ++y) {
    std::span<double> dst(out.data() + static_cast<size_t>(y) * out_w, out_w);
    for (int k = 0; k < s; ++k) {
      simd::Axpy(dst, std::span<const double>(rows).subspan(static_cast<size_t>(y + k) * out_w, out_w),
                 weights[k]);
    }
  }
  return out;
}

}  // namespace

void Image::Validate() const {
  if (height < 1 || width < 1) throw ValidationError("image dimensions must be >= 1");
  if (pixels.size() != static_cast<size_t>(height) * width) {
    throw ValidationError("image pixel count does not match dimensions");
  }
  for (double p : pixels) {
    if (!std::isfinite(p) || p < 0.0 || p > 255.0) {
      throw ValidationError("pixel value outside [0,255]");
    }
  }
}

Image Image::FromInterleavedRgb(int height, int width, std::span<const double> rgb) {
  if (rgb.size() != static_cast<size_t>(height) * width * 3) {
    throw ValidationError("rgb buffer does not match dimensions");
  }
  Image img(height, width);
  for (size_t i = 0; i < img.pixels.size(); ++i) {
    img.pixels[i] = (rgb[3 * i] + rgb[3 * i + 1] + rgb[3 * i + 2]) / 3.0;
  }
  return img;
}

WindowSpec WindowSpec::Gaussian(int size, double sigma) {
  WindowSpec w;
  w.kind = WindowKind::kGaussian;
  w.size = size;
  w.sigma = sigma;
  return w;
}

WindowSpec WindowSpec::Uniform(int side) {
  WindowSpec w;
  w.kind = WindowKind::kUniform;
  w.size = side;
  return w;
}

std::vector<double> WindowSpec::Weights() const {
  if (size < 1) throw ValidationError("window size must be >= 1");
  std::vector<double> w(size);
  if (kind == WindowKind::kUniform) {
    std::fill(w.begin(), w.end(), 1.0 / size);
    return w;
  }
  if (!(sigma > 0)) throw ValidationError("gaussian window needs sigma > 0");
  const double center = (size - 1) / 2.0;
  for (int i = 0; i < size; ++i) {
    const double x = i - center;
    w[i] = std::exp(-(x * x) / (2 * sigma * sigma));
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& v : w) v /= total;
  return w;
}

SsimMap ComputeSsim(const Image& a, const Image& b, const WindowSpec& window) {
  CheckPair(a, b);
  if (window.size > a.height || window.size > a.width) {
    throw ValidationError("window larger than image");
  }
  const auto weights = window.Weights();
  const size_t n = a.pixels.size();

  std::vector<double> aa(n), bb(n), ab(n);
  simd::Multiply(aa, a.pixels, a.pixels);
  simd::Multiply(bb, b.pixels, b.pixels);
  simd::Multiply(ab, a.pixels, b.pixels);

  const auto mu_a = FilterValid(a.pixels, a.height, a.width, weights);
  const auto mu_b = FilterValid(b.pixels, a.height, a.width, weights);
  const auto e_aa = FilterValid(aa, a.height, a.width, weights);
  const auto e_bb = FilterValid(bb, a.height, a.width, weights);
  const auto e_ab = FilterValid(ab, a.height, a.width, weights);

  const double c1 = window.C1();
  const double c2 = window.C2();
  SsimMap out;
  out.height = a.height - window.size + 1;
  out.width = a.width - window.size + 1;
  out.values.resize(mu_a.size());
  for (size_t i = 0; i < mu_a.size(); ++i) {
    const double ma = mu_a[i];
    const double mb = mu_b[i];
    const double var_a = e_aa[i] - ma * ma;
    const double var_b = e_bb[i] - mb * mb;
    const double cov = e_ab[i] - ma * mb;
    const double num = (2 * ma * mb + c1) * (2 * cov + c2);
    const double den = (ma * ma + mb * mb + c1) * (var_a + var_b + c2);
    out.values[i] = std::clamp(num / den, -1.0, 1.0);
  }
  return out;
}

DifferenceMap ComputeDifferenceMap(const Image& a, const Image& b, const WindowSpec& window) {
  const SsimMap ssim = ComputeSsim(a, b, window);
  DifferenceMap d{ssim.height, ssim.width, std::vector<double>(ssim.values.size())};
  for (size_t i = 0; i < d.values.size(); ++i) {
    d.values[i] = std::clamp((1.0 - ssim.values[i]) / 2.0, 0.0, 1.0);
  }
  return d;
}

bool PyramidEmbedder::Supports(int height, int width) const {
  if (levels_ < 1) return false;
  const int min_side = 1 << (levels_ - 1);
  return height >= min_side && width >= min_side;
}

std::vector<double> PyramidEmbedder::Embed(const Image& image) const {
  image.Validate();
  if (!Supports(image.height, image.width)) {
    throw ValidationError("pyramid embedder undefined for " + std::to_string(image.height) + "x" +
                          std::to_string(image.width) + " images (needs sides >= " +
                          std::to_string(1 << (levels_ - 1)) + ")");
  }
  std::vector<double> embedding;
  std::vector<double> level = image.pixels;
  int h = image.height;
  int w = image.width;
  for (int l = 0; l < levels_; ++l) {
    if (l > 0) {
      const int nh = h / 2;
      const int nw = w / 2;
      std::vector<double> pooled(static_cast<size_t>(nh) * nw);
      for (int y = 0; y < nh; ++y) {
        for (int x = 0; x < nw; ++x) {
          const double* r0 = level.data() + static_cast<size_t>(2 * y) * w + 2 * x;
          const double* r1 = r0 + w;
          pooled[static_cast<size_t>(y) * nw + x] = (r0[0] + r0[1] + r1[0] + r1[1]) / 4.0;
        }
      }
      level = std::move(pooled);
      h = nh;
      w = nw;
    }
    double norm_sq = 0.0;
    for (double v : level) norm_sq += v * v;
    const double norm = std::sqrt(norm_sq);
    for (double v : level) embedding.push_back(norm > 0 ? v / norm : 0.0);
  }
  return embedding;
}

double RewardScore(const Image& a, const Image& b, const Embedder& embedder) {
  CheckPair(a, b);
  if (!embedder.Supports(a.height, a.width)) {
    throw ValidationError(embedder.Name() + " embedder undefined for image dimensions");
  }
  const auto ea = embedder.Embed(a);
  const auto eb = embedder.Embed(b);
  double sum = 0.0;
  for (size_t i = 0; i < ea.size(); ++i) {
    const double d = ea[i] - eb[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

double ChannelReward(std::span<const ImagePair> pairs, const Embedder& embedder) {
  if (pairs.empty()) throw ValidationError("channel reward needs at least one image pair");
  std::vector<double> scores;
  scores.reserve(pairs.size());
  for (const auto& p : pairs) scores.push_back(RewardScore(p.plus, p.minus, embedder));
  std::sort(scores.begin(), scores.end());
  return std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
}

}  // namespace stylecover
