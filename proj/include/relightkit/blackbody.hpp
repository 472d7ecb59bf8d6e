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
#include <cmath>
#include <string>
#include <vector>

#include "relightkit/image.hpp"

namespace relightkit {

namespace detail {

// Piecewise-Gaussian fit of the CIE 1931 2-degree color matching functions
// (Wyman, Sloan and Shirley, JCGT 2013).
inline double cmf_lobe(double lambda, double mu, double s1, double s2) {
  const double t = (lambda - mu) / (lambda < mu ? s1 : s2);
  return std::exp(-0.5 * t * t);
}

inline Vec3 cie_xyz_cmf(double lambda) {
  return {1.056 * cmf_lobe(lambda, 599.8, 37.9, 31.0) + 0.362 * cmf_lobe(lambda, 442.0, 16.0, 26.7) -
              0.065 * cmf_lobe(lambda, 501.1, 20.4, 26.2),
          0.821 * cmf_lobe(lambda, 568.8, 46.9, 40.5) + 0.286 * cmf_lobe(lambda, 530.9, 16.3, 31.1),
          1.217 * cmf_lobe(lambda, 437.0, 11.8, 36.0) + 0.681 * cmf_lobe(lambda, 459.0, 26.0, 13.8)};
}

inline double planck(double lambda_nm, double kelvin) {
  constexpr double h = 6.62607015e-34;
  constexpr double c = 2.99792458e8;
  constexpr double k = 1.380649e-23;
  const double l = lambda_nm * 1e-9;
  return 2.0 * h * c * c / (l * l * l * l * l) / std::expm1(h * c / (l * k * kelvin));
}

}  // namespace detail

// Linear-sRGB color of a blackbody radiator, scaled so the largest channel
// is 1. Out-of-gamut (negative) components are clipped to 0.
inline Vec3 blackbody_rgb(double kelvin) {
  if (!(kelvin >= 1000.0 && kelvin <= 40000.0)) {
    throw Error::invalid_field("kelvin", "must lie in [1000, 40000]");
  }
  Vec3 xyz = {0.0, 0.0, 0.0};
  for (int nm = 380; nm <= 780; ++nm) {
    const double p = detail::planck(nm, kelvin);
    const Vec3 cmf = detail::cie_xyz_cmf(nm);
    for (int i = 0; i < 3; ++i) xyz[i] += p * cmf[i];
  }
  static constexpr double kXyzToSrgb[9] = {3.2404542, -1.5371385, -0.4985314, -0.9692660, 1.8760108,
                                           0.0415560, 0.0556434,  -0.2040259, 1.0572252};
  Vec3 rgb;
  for (int r = 0; r < 3; ++r) {
    rgb[r] = std::max(0.0, kXyzToSrgb[3 * r] * xyz[0] + kXyzToSrgb[3 * r + 1] * xyz[1] +
                               kXyzToSrgb[3 * r + 2] * xyz[2]);
  }
  const double peak = std::max({rgb[0], rgb[1], rgb[2]});
  return {rgb[0] / peak, rgb[1] / peak, rgb[2] / peak};
}

struct PaletteEntry {
  std::string name;
  double kelvin = 0.0;  // 0 for the neutral entry
  Vec3 rgb;
};

inline std::vector<PaletteEntry> blackbody_palette(const std::vector<double>& kelvins) {
  std::vector<PaletteEntry> out;
  out.push_back({"neutral", 0.0, {1.0, 1.0, 1.0}});
  for (double k : kelvins) {
    out.push_back({std::to_string(static_cast<int>(k)) + "K", k, blackbody_rgb(k)});
  }
  return out;
}

}  // namespace relightkit
