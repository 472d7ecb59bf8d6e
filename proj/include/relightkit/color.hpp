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

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>

#include "relightkit/image.hpp"

namespace relightkit {

inline constexpr Vec3 kRec709Luma = {0.2126, 0.7152, 0.0722};

// sRGB opto-electronic transfer on [0, 1]; inputs outside are clipped.
inline double srgb_oetf(double v) {
  v = std::clamp(v, 0.0, 1.0);
  if (v <= 0.0031308) return 12.92 * v;
  return 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

inline double srgb_eotf(double v) {
  if (v <= 0.04045) return v / 12.92;
  return std::pow((v + 0.055) / 1.055, 2.4);
}

// Round-half-up quantization of a display value in [0, 1].
inline std::uint8_t quantize_unit(double v) {
  const double scaled = std::floor(std::clamp(v, 0.0, 1.0) * 255.0 + 0.5);
  return static_cast<std::uint8_t>(scaled);
}

inline std::uint8_t srgb_encode_value(double linear) {
  return quantize_unit(srgb_oetf(linear));
}

// Decoded linear value for each 8-bit code.
inline const std::array<float, 256>& srgb_decode_table() {
  static const std::array<float, 256> table = [] {
    std::array<float, 256> t{};
    for (int i = 0; i < 256; ++i) {
      t[i] = static_cast<float>(srgb_eotf(i / 255.0));
    }
    return t;
  }();
  return table;
}

inline SdrImage srgb_encode(const LinearImage& img) {
  SdrImage out(img.width(), img.height());
  auto src = img.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i] = srgb_encode_value(src[i]);
  }
  return out;
}

inline LinearImage srgb_decode(const SdrImage& img) {
  const auto& table = srgb_decode_table();
  LinearImage out(img.width(), img.height());
  auto src = img.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = table[src[i]];
  return out;
}

inline double luminance(const Vec3& rgb) {
  return kRec709Luma[0] * rgb[0] + kRec709Luma[1] * rgb[1] +
         kRec709Luma[2] * rgb[2];
}

inline Plane luminance(const LinearImage& img) {
  Plane out(img.width(), img.height());
  auto src = img.data();
  auto dst = out.data();
  for (std::size_t p = 0; p < out.pixel_count(); ++p) {
    dst[p] = static_cast<float>(luminance(
        Vec3{src[3 * p], src[3 * p + 1], src[3 * p + 2]}));
  }
  return out;
}

// Mean Rec. 709 luma of the 8-bit codes, in [0, 1].
inline double mean_luma(const SdrImage& img) {
  double sum = 0.0;
  auto d = img.data();
  for (std::size_t p = 0; p < img.pixel_count(); ++p) {
    sum += luminance(Vec3{double(d[3 * p]), double(d[3 * p + 1]),
                          double(d[3 * p + 2])});
  }
  return sum / (255.0 * static_cast<double>(img.pixel_count()));
}

}  // namespace relightkit
