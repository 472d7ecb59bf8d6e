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

// Full-reference metrics on 8-bit images.

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "relightkit/error.hpp"
#include "relightkit/image.hpp"

namespace relightkit {

namespace detail {

inline void require_same_size(const SdrImage& a, const SdrImage& b) {
  if (!a.same_size(b)) {
    throw Error(ErrorCode::kInvalidInput, "image dimensions differ: " + std::to_string(a.width()) + "x" +
                                              std::to_string(a.height()) + " vs " + std::to_string(b.width()) +
                                              "x" + std::to_string(b.height()));
  }
}

}  // namespace detail

inline double mse(const SdrImage& a, const SdrImage& b) {
  detail::require_same_size(a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) {
    const double d = static_cast<double>(a.values()[i]) - b.values()[i];
    sum += d * d;
  }
  return sum / static_cast<double>(a.values().size());
}

// Identical images give +infinity.
inline double psnr(const SdrImage& a, const SdrImage& b) {
  const double m = mse(a, b);
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / m);
}

inline constexpr int kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;
inline constexpr double kSsimK1 = 0.01;
inline constexpr double kSsimK2 = 0.03;

inline const std::array<double, kSsimWindow>& ssim_kernel_1d() {
  static const std::array<double, kSsimWindow> k = [] {
    std::array<double, kSsimWindow> w{};
    double sum = 0.0;
    for (int i = 0; i < kSsimWindow; ++i) {
      const double t = i - kSsimWindow / 2;
      w[i] = std::exp(-t * t / (2.0 * kSsimSigma * kSsimSigma));
      sum += w[i];
    }
    for (double& v : w) v /= sum;
    return w;
  }();
  return k;
}

// SSIM of one window given its weighted statistics.
inline double ssim_from_moments(double mu_a, double mu_b, double var_a, double var_b, double cov) {
  constexpr double c1 = (kSsimK1 * 255.0) * (kSsimK1 * 255.0);
  constexpr double c2 = (kSsimK2 * 255.0) * (kSsimK2 * 255.0);
  return ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
         ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
}

// Mean SSIM over all fully contained 11x11 windows, per channel, then
// averaged over channels.
inline double ssim(const SdrImage& a, const SdrImage& b) {
  detail::require_same_size(a, b);
  if (a.width() < kSsimWindow || a.height() < kSsimWindow) {
    throw Error(ErrorCode::kInvalidInput, "SSIM needs images of at least 11x11");
  }
  if (a == b) return 1.0;
  const auto& k = ssim_kernel_1d();
  const int w = a.width();
  const int h = a.height();
  const int ow = w - kSsimWindow + 1;
  const int oh = h - kSsimWindow + 1;
  // Separable weighted sums of a, b, a^2, b^2, ab.
  std::vector<std::array<double, 5>> rows(static_cast<std::size_t>(ow) * h);
  double total = 0.0;
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < ow; ++x) {
        std::array<double, 5> s{};
        for (int i = 0; i < kSsimWindow; ++i) {
          const double va = a.at(x + i, y, c);
          const double vb = b.at(x + i, y, c);
          s[0] += k[i] * va;
          s[1] += k[i] * vb;
          s[2] += k[i] * va * va;
          s[3] += k[i] * vb * vb;
          s[4] += k[i] * va * vb;
        }
        rows[static_cast<std::size_t>(y) * ow + x] = s;
      }
    }
    double channel = 0.0;
    for (int y = 0; y < oh; ++y) {
      for (int x = 0; x < ow; ++x) {
        std::array<double, 5> s{};
        for (int i = 0; i < kSsimWindow; ++i) {
          const auto& r = rows[static_cast<std::size_t>(y + i) * ow + x];
          for (int j = 0; j < 5; ++j) s[j] += k[i] * r[j];
        }
        channel += ssim_from_moments(s[0], s[1], s[2] - s[0] * s[0], s[3] - s[1] * s[1], s[4] - s[0] * s[1]);
      }
    }
    total += channel / (static_cast<double>(ow) * oh);
  }
  return total / 3.0;
}

}  // namespace relightkit
