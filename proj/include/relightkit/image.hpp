// Copyright 2026 The Relightkit Authors. All Rights Reserved.
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

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "relightkit/error.hpp"

namespace relightkit {

using Vec3 = std::array<double, 3>;

// Interleaved, row-major pixel buffer. Row 0 is the top row.
template <typename T, int Channels>
class Image {
 public:
  using value_type = T;
  static constexpr int kChannels = Channels;

  Image() = default;

  Image(int width, int height) : width_(width), height_(height) {
    check_dims(width, height);
    data_.assign(size_for(width, height), T{});
  }

  Image(int width, int height, std::vector<T> data)
      : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height);
    if (data_.size() != size_for(width, height)) {
      throw Error(ErrorCode::kInvalidInput,
                  "image data length " + std::to_string(data_.size()) +
                      " does not match " + std::to_string(width) + "x" +
                      std::to_string(height) + "x" + std::to_string(Channels));
    }
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }
  bool empty() const { return data_.empty(); }

  std::span<const T> data() const { return data_; }
  std::span<T> data() { return data_; }
  const std::vector<T>& values() const { return data_; }

  T& at(int x, int y, int c = 0) { return data_[index(x, y, c)]; }
  const T& at(int x, int y, int c = 0) const { return data_[index(x, y, c)]; }

  std::size_t index(int x, int y, int c = 0) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) *
               Channels +
           static_cast<std::size_t>(c);
  }

  template <typename U, int C2>
  bool same_size(const Image<U, C2>& other) const {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Image& a, const Image& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ && a.data_ == b.data_;
  }

 private:
  static void check_dims(int width, int height) {
    if (width < 1 || height < 1) {
      throw Error(ErrorCode::kInvalidInput,
                  "image dimensions must be >= 1, got " +
                      std::to_string(width) + "x" + std::to_string(height));
    }
  }
  static std::size_t size_for(int width, int height) {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height) *
           Channels;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

// 8-bit sRGB-encoded display image.
using SdrImage = Image<std::uint8_t, 3>;

// Single-channel float plane (masks, depth, luminance, conditioning planes).
using Plane = Image<float, 1>;

// Scene-linear RGB radiance. Every value is finite and >= 0; the checked
// constructor enforces it for externally supplied data.
class LinearImage : public Image<float, 3> {
 public:
  LinearImage() = default;
  LinearImage(int width, int height) : Image(width, height) {}
  LinearImage(int width, int height, std::vector<float> data)
      : Image(width, height, std::move(data)) {
    for (std::size_t i = 0; i < values().size(); ++i) {
      const float v = values()[i];
      if (!std::isfinite(v) || v < 0.0f) {
        throw Error(ErrorCode::kInvalidInput,
                    "linear image value at index " + std::to_string(i) +
                        " is negative or non-finite");
      }
    }
  }

  Vec3 pixel(int x, int y) const {
    return {at(x, y, 0), at(x, y, 1), at(x, y, 2)};
  }
};

enum class CfaPattern { kRGGB, kBGGR, kGRBG, kGBRG };

inline std::string cfa_name(CfaPattern p) {
  switch (p) {
    case CfaPattern::kRGGB: return "RGGB";
    case CfaPattern::kBGGR: return "BGGR";
    case CfaPattern::kGRBG: return "GRBG";
    case CfaPattern::kGBRG: return "GBRG";
  }
  return "RGGB";
}

inline CfaPattern parse_cfa(const std::string& name) {
  if (name == "RGGB") return CfaPattern::kRGGB;
  if (name == "BGGR") return CfaPattern::kBGGR;
  if (name == "GRBG") return CfaPattern::kGRBG;
  if (name == "GBRG") return CfaPattern::kGBRG;
  throw Error(ErrorCode::kInvalidInput, "unknown CFA pattern '" + name + "'");
}

// Channel (0=R, 1=G, 2=B) sampled at (x, y) by the 2x2 CFA tile.
inline int cfa_channel(CfaPattern p, int x, int y) {
  static constexpr std::array<std::array<int, 4>, 4> kTiles = {{
      {0, 1, 1, 2},  // RGGB
      {2, 1, 1, 0},  // BGGR
      {1, 0, 2, 1},  // GRBG
      {1, 2, 0, 1},  // GBRG
  }};
  return kTiles[static_cast<int>(p)][(y & 1) * 2 + (x & 1)];
}

// Raw sensor plane with its color filter layout. Dimensions are even and
// samples finite and >= 0.
class BayerMosaic {
 public:
  BayerMosaic(Plane plane, CfaPattern pattern)
      : plane_(std::move(plane)), pattern_(pattern) {
    if (plane_.width() % 2 != 0 || plane_.height() % 2 != 0) {
      throw Error(ErrorCode::kInvalidInput,
                  "Bayer mosaic dimensions must be even, got " +
                      std::to_string(plane_.width()) + "x" +
                      std::to_string(plane_.height()));
    }
    for (float v : plane_.values()) {
      if (!std::isfinite(v) || v < 0.0f) {
        throw Error(ErrorCode::kInvalidInput,
                    "Bayer mosaic samples must be finite and >= 0");
      }
    }
  }

  const Plane& plane() const { return plane_; }
  CfaPattern pattern() const { return pattern_; }
  int width() const { return plane_.width(); }
  int height() const { return plane_.height(); }

 private:
  Plane plane_;
  CfaPattern pattern_;
};

}  // namespace relightkit
