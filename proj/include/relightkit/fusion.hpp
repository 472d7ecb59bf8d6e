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

// Multi-exposure fusion of synthetic exposures of one linear image.
//
// Each exposure scale yields a display-referred candidate (sRGB curve applied
// to the scaled, clipped radiance). Candidates are weighted per pixel by
// contrast, saturation and well-exposedness, the weights are normalized to
// sum to one, and the candidates are blended band by band: Laplacian pyramid
// of each candidate times the Gaussian pyramid of its weight map.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "relightkit/color.hpp"
#include "relightkit/image.hpp"

namespace relightkit {

struct FusionParams {
  // Number of pyramid levels; unset means floor(log2(min(w, h))) - 1.
  std::optional<int> pyramid_levels;
  double sigma_exposedness = 0.2;
  double contrast_exponent = 1.0;
  double saturation_exponent = 1.0;
  double exposedness_exponent = 1.0;
};

inline void validate(const FusionParams& f) {
  if (f.pyramid_levels && *f.pyramid_levels < 1) {
    throw Error::invalid_field("pyramid_levels", "must be >= 1");
  }
  if (!(f.sigma_exposedness > 0.0)) {
    throw Error::invalid_field("sigma_exposedness", "must be > 0");
  }
  if (f.contrast_exponent < 0.0 || f.saturation_exponent < 0.0 ||
      f.exposedness_exponent < 0.0) {
    throw Error::invalid_field("weight_exponents", "must be >= 0");
  }
}

namespace fusion_detail {

// Planar double-precision buffer used inside the pyramids.
struct Buffer {
  int w = 0;
  int h = 0;
  int c = 0;
  std::vector<double> v;

  Buffer() = default;
  Buffer(int w_, int h_, int c_)
      : w(w_), h(h_), c(c_), v(static_cast<std::size_t>(w_) * h_ * c_, 0.0) {}

  double& at(int x, int y, int ch) {
    return v[(static_cast<std::size_t>(ch) * h + y) * w + x];
  }
  double at(int x, int y, int ch) const {
    return v[(static_cast<std::size_t>(ch) * h + y) * w + x];
  }
};

inline int reflect101(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * n - 2 - i;
  }
  return i;
}

inline constexpr double kBinomial5[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};

// 5-tap binomial blur followed by 2x decimation.
inline Buffer reduce(const Buffer& in) {
  const int ow = (in.w + 1) / 2;
  const int oh = (in.h + 1) / 2;
  Buffer tmp(ow, in.h, in.c);
  for (int ch = 0; ch < in.c; ++ch) {
    for (int y = 0; y < in.h; ++y) {
      for (int x = 0; x < ow; ++x) {
        double s = 0.0;
        for (int k = 0; k < 5; ++k) s += kBinomial5[k] * in.at(reflect101(2 * x + k - 2, in.w), y, ch);
        tmp.at(x, y, ch) = s;
      }
    }
  }
  Buffer out(ow, oh, in.c);
  for (int ch = 0; ch < in.c; ++ch) {
    for (int y = 0; y < oh; ++y) {
      for (int x = 0; x < ow; ++x) {
        double s = 0.0;
        for (int k = 0; k < 5; ++k) s += kBinomial5[k] * tmp.at(x, reflect101(2 * y + k - 2, in.h), ch);
        out.at(x, y, ch) = s;
      }
    }
  }
  return out;
}

// Inverse of the decimation: interpolates `in` up to (w, h) with the same
// binomial kernel. Even output samples use taps (1, 6, 1)/8, odd ones (1, 1)/2.
inline Buffer expand(const Buffer& in, int w, int h) {
  auto taps = [](int x, int n_in, int* idx, double* wt) {
    const int m = x / 2;
    if (x % 2 == 0) {
      idx[0] = std::clamp(m - 1, 0, n_in - 1);
      idx[1] = std::clamp(m, 0, n_in - 1);
      idx[2] = std::clamp(m + 1, 0, n_in - 1);
      wt[0] = 1.0 / 8;
      wt[1] = 6.0 / 8;
      wt[2] = 1.0 / 8;
      return 3;
    }
    idx[0] = std::clamp(m, 0, n_in - 1);
    idx[1] = std::clamp(m + 1, 0, n_in - 1);
    wt[0] = 0.5;
    wt[1] = 0.5;
    return 2;
  };
  Buffer tmp(w, in.h, in.c);
  int idx[3];
  double wt[3];
  for (int x = 0; x < w; ++x) {
    const int n = taps(x, in.w, idx, wt);
    for (int ch = 0; ch < in.c; ++ch) {
      for (int y = 0; y < in.h; ++y) {
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += wt[k] * in.at(idx[k], y, ch);
        tmp.at(x, y, ch) = s;
      }
    }
  }
  Buffer out(w, h, in.c);
  for (int y = 0; y < h; ++y) {
    const int n = taps(y, in.h, idx, wt);
    for (int ch = 0; ch < in.c; ++ch) {
      for (int x = 0; x < w; ++x) {
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += wt[k] * tmp.at(x, idx[k], ch);
        out.at(x, y, ch) = s;
      }
    }
  }
  return out;
}

inline std::vector<Buffer> gaussian_pyramid(Buffer base, int levels) {
  std::vector<Buffer> pyr;
  pyr.reserve(levels);
  pyr.push_back(std::move(base));
  for (int l = 1; l < levels; ++l) pyr.push_back(reduce(pyr.back()));
  return pyr;
}

inline std::vector<Buffer> laplacian_pyramid(Buffer base, int levels) {
  auto pyr = gaussian_pyramid(std::move(base), levels);
  for (int l = 0; l + 1 < levels; ++l) {
    const Buffer up = expand(pyr[l + 1], pyr[l].w, pyr[l].h);
    for (std::size_t i = 0; i < pyr[l].v.size(); ++i) pyr[l].v[i] -= up.v[i];
  }
  return pyr;
}

inline Buffer collapse(std::vector<Buffer> pyr) {
  for (int l = static_cast<int>(pyr.size()) - 2; l >= 0; --l) {
    const Buffer up = expand(pyr[l + 1], pyr[l].w, pyr[l].h);
    for (std::size_t i = 0; i < pyr[l].v.size(); ++i) pyr[l].v[i] += up.v[i];
  }
  return std::move(pyr.front());
}

// The exposed radiance is rounded to float, matching a scaled LinearImage.
inline double scaled_radiance(float v, double scale) {
  return static_cast<float>(static_cast<double>(v) * scale);
}

inline Buffer candidate(const LinearImage& img, double scale) {
  Buffer out(img.width(), img.height(), 3);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int ch = 0; ch < 3; ++ch) {
        out.at(x, y, ch) = srgb_oetf(scaled_radiance(img.at(x, y, ch), scale));
      }
    }
  }
  return out;
}

// Unnormalized quality weight of each candidate pixel.
inline Buffer quality_weights(const Buffer& cand, const FusionParams& f) {
  const int w = cand.w;
  const int h = cand.h;
  Buffer gray(w, h, 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      gray.at(x, y, 0) = luminance(Vec3{cand.at(x, y, 0), cand.at(x, y, 1), cand.at(x, y, 2)});
    }
  }
  const double two_sigma_sq = 2.0 * f.sigma_exposedness * f.sigma_exposedness;
  Buffer weight(w, h, 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      auto g = [&](int xx, int yy) {
        return gray.at(std::clamp(xx, 0, w - 1), std::clamp(yy, 0, h - 1), 0);
      };
      const double contrast =
          std::abs((g(x - 1, y) + g(x + 1, y)) + (g(x, y - 1) + g(x, y + 1)) - 4.0 * g(x, y));
      const double r = cand.at(x, y, 0);
      const double gg = cand.at(x, y, 1);
      const double b = cand.at(x, y, 2);
      const double mean = (r + gg + b) / 3.0;
      const double saturation = std::sqrt(
          ((r - mean) * (r - mean) + (gg - mean) * (gg - mean) + (b - mean) * (b - mean)) / 3.0);
      const double exposedness = std::exp(-(r - 0.5) * (r - 0.5) / two_sigma_sq) *
                                 std::exp(-(gg - 0.5) * (gg - 0.5) / two_sigma_sq) *
                                 std::exp(-(b - 0.5) * (b - 0.5) / two_sigma_sq);
      weight.at(x, y, 0) = std::pow(contrast, f.contrast_exponent) *
                           std::pow(saturation, f.saturation_exponent) *
                           std::pow(exposedness, f.exposedness_exponent);
    }
  }
  return weight;
}

}  // namespace fusion_detail

inline int auto_pyramid_levels(int width, int height) {
  const int min_dim = std::min(width, height);
  return std::max(1, static_cast<int>(std::floor(std::log2(min_dim))) - 1);
}

// Per-pixel fusion weights of each candidate, normalized to sum to 1.
// Where every weight is zero, candidates share the pixel uniformly.
inline std::vector<Plane> fusion_weights(const LinearImage& img, const std::vector<double>& scales,
                                         const FusionParams& params) {
  using namespace fusion_detail;
  validate(params);
  const int w = img.width();
  const int h = img.height();
  std::vector<Buffer> raw;
  raw.reserve(scales.size());
  for (double s : scales) raw.push_back(quality_weights(candidate(img, s), params));
  std::vector<Plane> out(scales.size(), Plane(w, h));
  const double uniform = 1.0 / static_cast<double>(scales.size());
  for (std::size_t i = 0; i < static_cast<std::size_t>(w) * h; ++i) {
    double sum = 0.0;
    for (const auto& r : raw) sum += r.v[i];
    for (std::size_t k = 0; k < raw.size(); ++k) {
      out[k].data()[i] = static_cast<float>(sum > 0.0 ? raw[k].v[i] / sum : uniform);
    }
  }
  return out;
}

inline SdrImage exposure_fusion(const LinearImage& img, const std::vector<double>& scales,
                                const FusionParams& params = {}) {
  using namespace fusion_detail;
  validate(params);
  if (scales.empty()) {
    throw Error(ErrorCode::kInvalidInput, "exposure fusion needs at least one scale");
  }
  for (double s : scales) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw Error::invalid_field("scales", "exposure scales must be finite and > 0");
    }
  }
  const int w = img.width();
  const int h = img.height();
  SdrImage out(w, h);

  // A lone candidate carries weight 1 everywhere; blending is the identity.
  if (scales.size() == 1) {
    auto src = img.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < src.size(); ++i) {
      dst[i] = quantize_unit(srgb_oetf(scaled_radiance(src[i], scales[0])));
    }
    return out;
  }

  const int max_levels = static_cast<int>(std::floor(std::log2(std::min(w, h)))) + 1;
  const int levels =
      std::clamp(params.pyramid_levels.value_or(auto_pyramid_levels(w, h)), 1, max_levels);

  std::vector<Buffer> cands;
  std::vector<Buffer> weights;
  for (double s : scales) {
    cands.push_back(candidate(img, s));
    weights.push_back(quality_weights(cands.back(), params));
  }
  const double uniform = 1.0 / static_cast<double>(scales.size());
  for (std::size_t i = 0; i < static_cast<std::size_t>(w) * h; ++i) {
    double sum = 0.0;
    for (const auto& wt : weights) sum += wt.v[i];
    for (auto& wt : weights) wt.v[i] = sum > 0.0 ? wt.v[i] / sum : uniform;
  }

  std::vector<Buffer> blended;
  for (std::size_t k = 0; k < cands.size(); ++k) {
    const auto lap = laplacian_pyramid(std::move(cands[k]), levels);
    const auto gw = gaussian_pyramid(std::move(weights[k]), levels);
    if (blended.empty()) {
      for (const auto& band : lap) blended.emplace_back(band.w, band.h, band.c);
    }
    for (int l = 0; l < levels; ++l) {
      Buffer& dst = blended[l];
      const Buffer& band = lap[l];
      const Buffer& wl = gw[l];
      for (int ch = 0; ch < 3; ++ch) {
        for (int y = 0; y < band.h; ++y) {
          for (int x = 0; x < band.w; ++x) dst.at(x, y, ch) += wl.at(x, y, 0) * band.at(x, y, ch);
        }
      }
    }
  }

  const Buffer result = collapse(std::move(blended));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int ch = 0; ch < 3; ++ch) out.at(x, y, ch) = quantize_unit(result.at(x, y, ch));
    }
  }
  return out;
}

}  // namespace relightkit
