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

// SDR production for relit sequences.
//
// "together": one exposure stack, derived from the relit image at the
// deciding intensities, is shared by every frame, so brightness differences
// between frames survive tone mapping.
// "separate": every frame derives its own exposure stack and ends up well
// exposed on its own, at the cost of consistent brightness across frames.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "relightkit/color.hpp"
#include "relightkit/fusion.hpp"
#include "relightkit/parallel.hpp"
#include "relightkit/percentile.hpp"
#include "relightkit/relight.hpp"

namespace relightkit {

enum class ToneMapMode { kTogether, kSeparate };

inline std::string tonemap_mode_name(ToneMapMode m) {
  return m == ToneMapMode::kTogether ? "together" : "separate";
}

inline ToneMapMode parse_tonemap_mode(const std::string& s) {
  if (s == "together") return ToneMapMode::kTogether;
  if (s == "separate") return ToneMapMode::kSeparate;
  throw Error::invalid_field("tonemap_mode", "expected 'together' or 'separate', got '" + s + "'");
}

struct ToneMapSpec {
  ToneMapMode mode = ToneMapMode::kTogether;
  double deciding_alpha = 1.0;
  double deciding_gamma = 1.0;
  std::vector<double> ev_offsets = {-2.0, 0.0, 2.0};  // stops
  double target_percentile = 0.99;
  double target_level = 0.85;
  FusionParams fusion;
};

inline void validate(const ToneMapSpec& s) {
  if (s.ev_offsets.empty() || !std::is_sorted(s.ev_offsets.begin(), s.ev_offsets.end())) {
    throw Error::invalid_field("ev_offsets", "must be non-empty and sorted ascending");
  }
  if (!(s.deciding_alpha >= 0.0) || !(s.deciding_gamma >= 0.0)) {
    throw Error::invalid_field("deciding", "deciding intensities must be >= 0");
  }
  if (!(s.target_percentile > 0.0 && s.target_percentile < 1.0)) {
    throw Error::invalid_field("target_percentile", "must lie in (0, 1)");
  }
  if (!(s.target_level > 0.0 && s.target_level < 1.0)) {
    throw Error::invalid_field("target_level", "must lie in (0, 1)");
  }
  validate(s.fusion);
}

// Exposure scales s * 2^ev, where s maps the target percentile of the
// image's luminance to target_level. When that percentile is zero (the lit
// area is tinier than the percentile's tail) the maximum anchors instead.
inline std::vector<double> compute_exposures(const LinearImage& deciding, const ToneMapSpec& spec) {
  validate(spec);
  const Plane luma = luminance(deciding);
  std::vector<float> values(luma.values());
  double anchor = percentile_nearest_rank(values, spec.target_percentile);
  if (!(anchor > 0.0)) anchor = *std::max_element(values.begin(), values.end());
  if (!(anchor > 0.0)) {
    throw Error(ErrorCode::kDegenerateExposure, "cannot expose an identically zero image");
  }
  const double base = spec.target_level / anchor;
  std::vector<double> scales;
  scales.reserve(spec.ev_offsets.size());
  for (double ev : spec.ev_offsets) scales.push_back(base * std::exp2(ev));
  return scales;
}

struct ToneMappedSequence {
  ToneMapMode mode = ToneMapMode::kTogether;
  RelightParams deciding;                   // together mode only
  std::vector<std::vector<double>> scales;  // together: one shared entry; separate: per frame
  std::vector<SdrImage> frames;
};

inline RelightParams deciding_params(const ToneMapSpec& spec, const Vec3& color) {
  return {spec.deciding_alpha, spec.deciding_gamma, color};
}

inline ToneMappedSequence tonemap_together(const LightPair& pair, const std::vector<RelightParams>& params,
                                           const ToneMapSpec& spec) {
  if (spec.mode != ToneMapMode::kTogether) {
    throw Error::invalid_field("tonemap_mode", "spec is not in 'together' mode");
  }
  ToneMappedSequence seq;
  seq.mode = ToneMapMode::kTogether;
  if (params.empty()) return seq;
  seq.deciding = deciding_params(spec, params.front().color);
  const auto scales = compute_exposures(relight(pair, seq.deciding), spec);
  seq.scales = {scales};
  seq.frames.resize(params.size());
  parallel_for(params.size(), [&](std::size_t i) {
    seq.frames[i] = exposure_fusion(relight(pair, params[i]), scales, spec.fusion);
  });
  return seq;
}

inline ToneMappedSequence tonemap_separate(const LightPair& pair, const std::vector<RelightParams>& params,
                                           const ToneMapSpec& spec) {
  if (spec.mode != ToneMapMode::kSeparate) {
    throw Error::invalid_field("tonemap_mode", "spec is not in 'separate' mode");
  }
  ToneMappedSequence seq;
  seq.mode = ToneMapMode::kSeparate;
  seq.scales.resize(params.size());
  seq.frames.resize(params.size());
  parallel_for(params.size(), [&](std::size_t i) {
    const LinearImage frame = relight(pair, params[i]);
    try {
      seq.scales[i] = compute_exposures(frame, spec);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDegenerateExposure) throw;
      throw Error(ErrorCode::kDegenerateExposure,
                  "frame " + std::to_string(i) + " is identically zero; cannot expose it");
    }
    seq.frames[i] = exposure_fusion(frame, seq.scales[i], spec.fusion);
  });
  return seq;
}

inline ToneMappedSequence tonemap(const LightPair& pair, const std::vector<RelightParams>& params,
                                  const ToneMapSpec& spec) {
  return spec.mode == ToneMapMode::kTogether ? tonemap_together(pair, params, spec)
                                             : tonemap_separate(pair, params, spec);
}

}  // namespace relightkit
