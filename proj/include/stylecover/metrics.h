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

#ifndef STYLECOVER_METRICS_H_
#define STYLECOVER_METRICS_H_

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace stylecover {

// Grayscale image, row-major, intensities in [0, 255].
struct Image {
  int height = 0;
  int width = 0;
  std::vector<double> pixels;

  Image() = default;
  Image(int h, int w, double fill = 0.0)
      : height(h), width(w), pixels(static_cast<size_t>(h) * w, fill) {}

  double& at(int y, int x) { return pixels[static_cast<size_t>(y) * width + x]; }
  double at(int y, int x) const { return pixels[static_cast<size_t>(y) * width + x]; }

  void Validate() const;

  // Interleaved RGB in [0, 255] reduced to the mean of the three channels.
  static Image FromInterleavedRgb(int height, int width, std::span<const double> rgb);
};

enum class WindowKind { kGaussian, kUniform };

// Local-statistics window and stabilizing constants for SSIM.
struct WindowSpec {
  WindowKind kind = WindowKind::kGaussian;
  int size = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 255.0;

  static WindowSpec Gaussian(int size = 11, double sigma = 1.5);
  static WindowSpec Uniform(int side = 7);

  // Normalized 1-D weights; the 2-D window is their outer product.
  std::vector<double> Weights() const;
  double C1() const { return (k1 * dynamic_range) * (k1 * dynamic_range); }
  double C2() const { return (k2 * dynamic_range) * (k2 * dynamic_range); }
};

// Per-pixel map over the "valid" window positions: (H - s + 1) x (W - s + 1).
struct SsimMap {
  int height = 0;
  int width = 0;
  std::vector<double> values;  // in [-1, 1]
};

struct DifferenceMap {
  int height = 0;
  int width = 0;
  std::vector<double> values;  // in [0, 1]; multiply by 255 for the 8-bit scale
};

SsimMap ComputeSsim(const Image& a, const Image& b, const WindowSpec& window);

// d = clamp((1 - ssim) / 2, 0, 1) per pixel.
DifferenceMap ComputeDifferenceMap(const Image& a, const Image& b, const WindowSpec& window);

// Maps an image to a feature vector; rewards are L2 distances between
// embeddings of the (+alpha, -alpha) pair.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::string Name() const = 0;
  virtual bool Supports(int height, int width) const = 0;
  virtual std::vector<double> Embed(const Image& image) const = 0;
};

// Self-contained stand-in for a learned perceptual embedding. Level 0 is the
// image itself; level l+1 is the 2x2 mean pool of level l (odd trailing
// rows/columns dropped). Each level is flattened row-major and scaled to unit
// L2 norm (an all-zero level stays zero); the levels are concatenated.
class PyramidEmbedder final : public Embedder {
 public:
  explicit PyramidEmbedder(int levels = 4) : levels_(levels) {}

  std::string Name() const override { return "pyramid"; }
  bool Supports(int height, int width) const override;
  std::vector<double> Embed(const Image& image) const override;

  int levels() const { return levels_; }

 private:
  int levels_;
};

struct ImagePair {
  Image plus;
  Image minus;
};

// L2 distance between the embeddings of a and b.
double RewardScore(const Image& a, const Image& b, const Embedder& embedder);

// Mean RewardScore over the pairs. Scores are summed in ascending order so
// the result does not depend on pair order.
double ChannelReward(std::span<const ImagePair> pairs, const Embedder& embedder);

}  // namespace stylecover

#endif  // STYLECOVER_METRICS_H_
