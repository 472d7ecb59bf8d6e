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

// Post-capture calibration of raw on/off photograph pairs: exposure
// normalization by the exposure product, white-balance interpolation, color
// correction with the on-image CCM, and the on/off disentanglement.

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "relightkit/demosaic.hpp"
#include "relightkit/image.hpp"
#include "relightkit/keyvalue.hpp"
#include "relightkit/pfm.hpp"

namespace relightkit {

using Mat3 = std::array<double, 9>;  // row-major

inline constexpr Mat3 kIdentityCcm = {1, 0, 0, 0, 1, 0, 0, 0, 1};

struct RawMeta {
  double exposure_time = 1.0;  // seconds
  double analog_gain = 1.0;
  double digital_gain = 1.0;
  Vec3 wb_gains = {1.0, 1.0, 1.0};
  Mat3 ccm = kIdentityCcm;  // camera RGB -> linear sRGB
  CfaPattern cfa = CfaPattern::kRGGB;
};

inline void validate(const RawMeta& m) {
  if (!(m.exposure_time > 0.0) || !std::isfinite(m.exposure_time)) {
    throw Error::invalid_field("exposure_time", "must be > 0");
  }
  if (!(m.analog_gain > 0.0) || !std::isfinite(m.analog_gain)) {
    throw Error::invalid_field("analog_gain", "must be > 0");
  }
  if (!(m.digital_gain > 0.0) || !std::isfinite(m.digital_gain)) {
    throw Error::invalid_field("digital_gain", "must be > 0");
  }
  for (double g : m.wb_gains) {
    if (!(g > 0.0) || !std::isfinite(g)) {
      throw Error::invalid_field("wb_gains", "must be > 0");
    }
  }
}

// Largest deviation of a CCM row sum from 1. Rows of a white-preserving
// matrix sum to 1; callers warn above 1e-3 but do not reject.
inline double ccm_row_sum_deviation(const Mat3& ccm) {
  double worst = 0.0;
  for (int r = 0; r < 3; ++r) {
    worst = std::max(worst,
                     std::abs(ccm[3 * r] + ccm[3 * r + 1] + ccm[3 * r + 2] - 1.0));
  }
  return worst;
}

inline constexpr double kCcmRowSumTolerance = 1e-3;

inline RawMeta parse_raw_meta(const KeyValues& kv) {
  RawMeta m;
  m.exposure_time = kv.get_double("exposure_time");
  m.analog_gain = kv.get_double("analog_gain");
  m.digital_gain = kv.get_double("digital_gain");
  m.wb_gains = {kv.get_double("wb_r"), kv.get_double("wb_g"), kv.get_double("wb_b")};
  const auto ccm = kv.get_doubles("ccm");
  if (ccm.size() != 9) {
    throw Error(ErrorCode::kFormat, "ccm needs 9 comma-separated values");
  }
  std::copy(ccm.begin(), ccm.end(), m.ccm.begin());
  m.cfa = parse_cfa(kv.get("cfa"));
  validate(m);
  return m;
}

inline RawMeta read_raw_meta(const std::filesystem::path& path) {
  return parse_raw_meta(KeyValues::read(path));
}

inline KeyValues to_key_values(const RawMeta& m) {
  KeyValues kv;
  kv.set("exposure_time", format_double(m.exposure_time));
  kv.set("analog_gain", format_double(m.analog_gain));
  kv.set("digital_gain", format_double(m.digital_gain));
  kv.set("wb_r", format_double(m.wb_gains[0]));
  kv.set("wb_g", format_double(m.wb_gains[1]));
  kv.set("wb_b", format_double(m.wb_gains[2]));
  kv.set("ccm", format_vec(m.ccm));
  kv.set("cfa", cfa_name(m.cfa));
  return kv;
}

inline void write_raw_meta(const RawMeta& m, const std::filesystem::path& path) {
  to_key_values(m).write(path);
}

// Sidecar path for a mosaic file: same basename, `.meta` extension.
inline std::filesystem::path sidecar_path(const std::filesystem::path& mosaic) {
  auto p = mosaic;
  p.replace_extension(".meta");
  return p;
}

inline double exposure_product(const RawMeta& m) {
  validate(m);
  return m.exposure_time * m.analog_gain * m.digital_gain;
}

inline LinearImage normalize_exposure(const LinearImage& img, double product) {
  if (!(product > 0.0) || !std::isfinite(product)) {
    throw Error::invalid_field("exposure_product", "must be > 0");
  }
  LinearImage out = img;
  for (float& v : out.data()) v = static_cast<float>(v / product);
  return out;
}

inline Vec3 interp_wb(const Vec3& wb_off, const Vec3& wb_on, double gamma) {
  Vec3 out;
  for (int c = 0; c < 3; ++c) out[c] = (1.0 - gamma) * wb_off[c] + gamma * wb_on[c];
  return out;
}

inline LinearImage apply_wb(const LinearImage& img, const Vec3& gains) {
  LinearImage out = img;
  auto d = out.data();
  for (std::size_t i = 0; i < d.size(); ++i) {
    d[i] = static_cast<float>(d[i] * gains[i % 3]);
  }
  return out;
}

inline LinearImage apply_ccm(const LinearImage& img, const Mat3& ccm) {
  LinearImage out(img.width(), img.height());
  auto src = img.data();
  auto dst = out.data();
  for (std::size_t p = 0; p < img.pixel_count(); ++p) {
    const double r = src[3 * p];
    const double g = src[3 * p + 1];
    const double b = src[3 * p + 2];
    for (int row = 0; row < 3; ++row) {
      const double v = ccm[3 * row] * r + ccm[3 * row + 1] * g + ccm[3 * row + 2] * b;
      dst[3 * p + row] = static_cast<float>(std::max(v, 0.0));
    }
  }
  return out;
}

// Interpolated exposure product used to un-normalize a relit image:
// ((1-g) a E_off + g E_on) ((1-g) a G_off + g G_on) ((1-g) a D_off + g D_on).
inline double relit_exposure_product(const RawMeta& off, const RawMeta& on,
                                     double alpha, double gamma) {
  validate(off);
  validate(on);
  auto mix = [&](double v_off, double v_on) {
    return (1.0 - gamma) * alpha * v_off + gamma * v_on;
  };
  const double p = mix(off.exposure_time, on.exposure_time) *
                   mix(off.analog_gain, on.analog_gain) *
                   mix(off.digital_gain, on.digital_gain);
  if (!(p > 0.0) || !std::isfinite(p)) {
    throw Error(ErrorCode::kDegenerateExposure,
                "relit exposure product is not positive (alpha=" +
                    format_double(alpha) + ", gamma=" + format_double(gamma) + ")");
  }
  return p;
}

inline LinearImage unnormalize_exposure(const LinearImage& img, double product) {
  return normalize_exposure(img, 1.0 / product);
}

struct Disentangled {
  LinearImage ambient;
  LinearImage change;
};

inline Disentangled disentangle(const LinearImage& on, const LinearImage& off) {
  if (!on.same_size(off)) {
    throw Error(ErrorCode::kInvalidInput, "on/off images differ in size");
  }
  LinearImage change(on.width(), on.height());
  auto a = on.data();
  auto b = off.data();
  auto d = change.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::max(a[i] - b[i], 0.0f);
  return {off, std::move(change)};
}

struct ResidualStats {
  double relative_error = 0.0;  // ||min(on-off,0)|| / ||max(on-off,0)||
  double pct_negative = 0.0;    // percent of entries with on < off
};

inline ResidualStats residual_stats(const LinearImage& on, const LinearImage& off) {
  if (!on.same_size(off)) {
    throw Error(ErrorCode::kInvalidInput, "on/off images differ in size");
  }
  auto a = on.data();
  auto b = off.data();
  double neg_sq = 0.0;
  double pos_sq = 0.0;
  std::size_t negatives = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    if (diff < 0.0) {
      neg_sq += diff * diff;
      ++negatives;
    } else {
      pos_sq += diff * diff;
    }
  }
  ResidualStats s;
  s.pct_negative = 100.0 * static_cast<double>(negatives) / static_cast<double>(a.size());
  if (pos_sq == 0.0) {
    if (neg_sq != 0.0) {
      throw Error(ErrorCode::kUndefinedRatio,
                  "positive residual is identically zero; relative error undefined");
    }
    return s;
  }
  s.relative_error = std::sqrt(neg_sq) / std::sqrt(pos_sq);
  return s;
}

struct CalibratedPair {
  LinearImage on;
  LinearImage off;
  RawMeta meta_on;
  RawMeta meta_off;
};

inline constexpr double kDefaultGammaRef = 1.0;

// Demosaic, exposure-normalize, white-balance (gains interpolated at
// gamma_ref) and color-correct both images with the on-image CCM.
inline CalibratedPair calibrate_pair(const BayerMosaic& mosaic_on, const RawMeta& meta_on,
                                     const BayerMosaic& mosaic_off, const RawMeta& meta_off,
                                     double gamma_ref = kDefaultGammaRef) {
  if (mosaic_on.width() != mosaic_off.width() ||
      mosaic_on.height() != mosaic_off.height()) {
    throw Error(ErrorCode::kInvalidInput, "on/off mosaics differ in size");
  }
  if (mosaic_on.pattern() != mosaic_off.pattern()) {
    throw Error(ErrorCode::kInvalidInput, "on/off mosaics use different CFA patterns");
  }
  const Vec3 gains = interp_wb(meta_off.wb_gains, meta_on.wb_gains, gamma_ref);
  auto process = [&](const BayerMosaic& mosaic, const RawMeta& meta) {
    LinearImage img = demosaic_bilinear(mosaic);
    img = normalize_exposure(img, exposure_product(meta));
    img = apply_wb(img, gains);
    return apply_ccm(img, meta_on.ccm);
  };
  return {process(mosaic_on, meta_on), process(mosaic_off, meta_off), meta_on, meta_off};
}

// Reads a mosaic plane (single-channel PFM) together with its sidecar.
inline std::pair<BayerMosaic, RawMeta> read_raw_capture(const std::filesystem::path& mosaic) {
  RawMeta meta = read_raw_meta(sidecar_path(mosaic));
  return {BayerMosaic(read_pfm_plane(mosaic), meta.cfa), meta};
}

}  // namespace relightkit
