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

// Conditioning records for a relighting model.
//
// Spatial planes, all at the output resolution:
//   [0..2] source image, display-referred (8-bit code / 255)
//   [3]    intensity: mask * delta_gamma
//   [4..6] color: mask * c_t per channel
//   [7]    depth, normalized to [0, 1]
// A latent-space model would replace planes 0..2 with its 4 encoder
// channels, giving 9 channels in total.
//
// Global scalars (ambient change and the tone-map strategy flag) are carried
// with sin/cos Fourier features.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <vector>

#include "relightkit/manifest.hpp"
#include "relightkit/pfm.hpp"
#include "relightkit/png.hpp"
#include "relightkit/resize.hpp"

namespace relightkit {

inline constexpr int kSpatialChannels = 8;
inline constexpr int kDefaultFourierFrequencies = 8;

namespace detail {

// sin(pi x) and cos(pi x), exact at multiples of 1/2.
inline double sin_pi(double x) {
  double r = std::fmod(x, 2.0);
  if (r < 0.0) r += 2.0;
  if (r == 0.0 || r == 1.0) return 0.0;
  if (r == 0.5) return 1.0;
  if (r == 1.5) return -1.0;
  return std::sin(std::numbers::pi * r);
}

inline double cos_pi(double x) {
  const double r = std::fmod(std::abs(x), 2.0);
  if (r == 0.0) return 1.0;
  if (r == 1.0) return -1.0;
  if (r == 0.5 || r == 1.5) return 0.0;
  return std::cos(std::numbers::pi * r);
}

}  // namespace detail

// [sin(2^k pi g), cos(2^k pi g)] for k = 0 .. num_freqs-1, sin first.
inline std::vector<double> fourier_features(double g, int num_freqs = kDefaultFourierFrequencies) {
  if (num_freqs < 0) throw Error::invalid_field("num_freqs", "must be >= 0");
  std::vector<double> out;
  out.reserve(2 * static_cast<std::size_t>(num_freqs));
  for (int k = 0; k < num_freqs; ++k) {
    const double phase = std::ldexp(g, k);
    out.push_back(detail::sin_pi(phase));
    out.push_back(detail::cos_pi(phase));
  }
  return out;
}

inline double tonemap_flag(ToneMapMode m) { return m == ToneMapMode::kTogether ? 1.0 : 0.0; }

struct ConditioningPack {
  Image<float, 3> image;
  Plane intensity;
  Image<float, 3> color;
  Plane depth;
  double delta_alpha = 0.0;
  double tonemap_flag = 0.0;
  std::vector<double> delta_alpha_features;
  std::vector<double> tonemap_flag_features;

  int width() const { return intensity.width(); }
  int height() const { return intensity.height(); }

  // The 8 spatial channels as separate planes, in stacking order.
  std::vector<Plane> spatial_planes() const {
    std::vector<Plane> planes;
    auto split = [&](const Image<float, 3>& img) {
      for (int c = 0; c < 3; ++c) {
        Plane p(img.width(), img.height());
        for (std::size_t i = 0; i < p.pixel_count(); ++i) p.data()[i] = img.data()[3 * i + c];
        planes.push_back(std::move(p));
      }
    };
    split(image);
    planes.push_back(intensity);
    split(color);
    planes.push_back(depth);
    return planes;
  }
};

inline void check_unit_plane(const Plane& p, const char* what) {
  for (float v : p.values()) {
    if (!(v >= 0.0f && v <= 1.0f)) throw Error::invalid_field(what, "values must lie in [0, 1]");
  }
}

inline ConditioningPack build_conditioning(const SampleRecord& rec, const SdrImage& source, const Plane& mask,
                                           const Plane& depth, int out_w, int out_h,
                                           int num_freqs = kDefaultFourierFrequencies) {
  if (out_w < 1 || out_h < 1) {
    throw Error(ErrorCode::kInvalidInput, "conditioning resolution must be at least 1x1");
  }
  check_unit_plane(mask, "mask");
  check_unit_plane(depth, "depth");

  Image<float, 3> display(source.width(), source.height());
  for (std::size_t i = 0; i < source.values().size(); ++i) {
    display.data()[i] = static_cast<float>(source.values()[i] / 255.0);
  }

  ConditioningPack pack;
  pack.image = resize_bilinear<3>(display, out_w, out_h);
  const Plane m = resize_bilinear<1>(mask, out_w, out_h);
  pack.depth = resize_bilinear<1>(depth, out_w, out_h);
  pack.intensity = Plane(out_w, out_h);
  pack.color = Image<float, 3>(out_w, out_h);
  for (std::size_t i = 0; i < m.pixel_count(); ++i) {
    const double mv = m.values()[i];
    pack.intensity.data()[i] = static_cast<float>(mv * rec.delta_gamma);
    for (int c = 0; c < 3; ++c) pack.color.data()[3 * i + c] = static_cast<float>(mv * rec.color[c]);
  }
  pack.delta_alpha = rec.delta_alpha;
  pack.tonemap_flag = tonemap_flag(rec.tonemap_mode);
  pack.delta_alpha_features = fourier_features(pack.delta_alpha, num_freqs);
  pack.tonemap_flag_features = fourier_features(pack.tonemap_flag, num_freqs);
  return pack;
}

inline nlohmann::json globals_to_json(const ConditioningPack& pack) {
  return {{"delta_alpha", pack.delta_alpha},
          {"tonemap_flag", pack.tonemap_flag},
          {"fourier",
           {{"delta_alpha", pack.delta_alpha_features}, {"tonemap_flag", pack.tonemap_flag_features}}}};
}

// Plane container: source.png, intensity.pfm, color_{r,g,b}.pfm, depth.pfm.
inline void write_conditioning_pack(const ConditioningPack& pack, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  SdrImage src(pack.image.width(), pack.image.height());
  for (std::size_t i = 0; i < src.values().size(); ++i) src.data()[i] = quantize_unit(pack.image.values()[i]);
  write_png(src, dir / "source.png");
  const auto planes = pack.spatial_planes();
  write_pfm_plane(planes[3], dir / "intensity.pfm");
  write_pfm_plane(planes[4], dir / "color_r.pfm");
  write_pfm_plane(planes[5], dir / "color_g.pfm");
  write_pfm_plane(planes[6], dir / "color_b.pfm");
  write_pfm_plane(planes[7], dir / "depth.pfm");
}

// Masks are 8-bit single-channel PNGs, binarized at 0.5 unless soft.
inline Plane ingest_mask(const std::filesystem::path& path, bool soft = false) {
  const GrayImage gray = read_png_gray(path);
  Plane out(gray.width(), gray.height());
  for (std::size_t i = 0; i < out.pixel_count(); ++i) {
    const double v = gray.values()[i] / 255.0;
    out.data()[i] = static_cast<float>(soft ? v : (v >= 0.5 ? 1.0 : 0.0));
  }
  return out;
}

// Depth planes are single-channel PFMs, min-max normalized to [0, 1]. A
// constant plane normalizes to all zeros.
inline Plane normalize_depth(const Plane& depth) {
  const auto [lo, hi] = std::minmax_element(depth.values().begin(), depth.values().end());
  const double min_v = *lo;
  const double range = static_cast<double>(*hi) - min_v;
  Plane out(depth.width(), depth.height());
  if (!(range > 0.0)) return out;
  for (std::size_t i = 0; i < out.pixel_count(); ++i) {
    out.data()[i] = static_cast<float>(std::clamp((depth.values()[i] - min_v) / range, 0.0, 1.0));
  }
  return out;
}

inline Plane ingest_depth(const std::filesystem::path& path) { return normalize_depth(read_pfm_plane(path)); }

}  // namespace relightkit
