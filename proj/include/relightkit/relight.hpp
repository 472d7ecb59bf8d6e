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

// Light arithmetic on disentangled pairs. A relit image is a non-negative
// linear combination of the ambient image and the recolored light image:
//
//   relit = alpha * ambient + gamma * (change (*) c),   c = c_t / c_o
//
// where (*) and / are per-channel.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "relightkit/color.hpp"
#include "relightkit/image.hpp"
#include "relightkit/keyvalue.hpp"
#include "relightkit/parallel.hpp"
#include "relightkit/percentile.hpp"

namespace relightkit {

enum class Domain { kReal, kSynthetic };

inline std::string domain_name(Domain d) {
  return d == Domain::kReal ? "real" : "synthetic";
}

inline Domain parse_domain(const std::string& s) {
  if (s == "real") return Domain::kReal;
  if (s == "synthetic") return Domain::kSynthetic;
  throw Error(ErrorCode::kFormat, "unknown domain '" + s + "'");
}

struct LightPair {
  LinearImage ambient;
  LinearImage change;
  Vec3 source_color = {1.0, 1.0, 1.0};  // c_o, max channel 1
  Domain domain = Domain::kReal;
  std::string pair_id;
};

inline void validate(const LightPair& pair) {
  if (!pair.ambient.same_size(pair.change)) {
    throw Error(ErrorCode::kInvalidInput,
                "pair '" + pair.pair_id + "': ambient and change differ in size");
  }
  for (double c : pair.source_color) {
    if (!(c > 0.0) || c > 1.0 + 1e-9) {
      throw Error(ErrorCode::kDegenerateColor,
                  "pair '" + pair.pair_id + "': source color components must be in (0, 1]");
    }
  }
}

inline constexpr Vec3 kNeutral = {1.0, 1.0, 1.0};

struct RelightParams {
  double alpha = 1.0;  // ambient scale
  double gamma = 1.0;  // target-light scale
  Vec3 color = kNeutral;  // c_t

  // Outside the [0, 1] training range; allowed, flagged downstream.
  bool extrapolated() const { return alpha > 1.0 || gamma > 1.0; }

  friend bool operator==(const RelightParams&, const RelightParams&) = default;
};

inline bool is_neutral(const Vec3& c, double tol = 1e-6) {
  return std::all_of(c.begin(), c.end(), [&](double v) { return std::abs(v - 1.0) <= tol; });
}

inline constexpr double kColorMaxTolerance = 1e-6;

inline void validate(const RelightParams& p) {
  if (!std::isfinite(p.alpha) || p.alpha < 0.0) {
    throw Error::invalid_field("alpha", "must be finite and >= 0");
  }
  if (!std::isfinite(p.gamma) || p.gamma < 0.0) {
    throw Error::invalid_field("gamma", "must be finite and >= 0");
  }
  double max_c = 0.0;
  for (double c : p.color) {
    if (!std::isfinite(c) || c < 0.0 || c > 1.0 + kColorMaxTolerance) {
      throw Error::invalid_field("color", "components must lie in [0, 1]");
    }
    max_c = std::max(max_c, c);
  }
  if (std::abs(max_c - 1.0) > kColorMaxTolerance) {
    throw Error::invalid_field("color", "largest component must be 1");
  }
}

// c_o estimate: mean RGB over the pixels whose luminance reaches the
// nearest-rank 90th percentile, scaled so the largest channel is 1.
inline Vec3 estimate_source_color(const LinearImage& change) {
  const Plane luma = luminance(change);
  std::vector<float> sorted(luma.values());
  const float threshold = percentile_nearest_rank(std::move(sorted), 0.9);
  Vec3 sum = {0.0, 0.0, 0.0};
  auto d = change.data();
  for (std::size_t p = 0; p < change.pixel_count(); ++p) {
    if (luma.values()[p] >= threshold) {
      for (int c = 0; c < 3; ++c) sum[c] += d[3 * p + c];
    }
  }
  const double peak = std::max({sum[0], sum[1], sum[2]});
  if (!(peak > 0.0)) {
    throw Error(ErrorCode::kNoLight, "light image is identically zero");
  }
  return {sum[0] / peak, sum[1] / peak, sum[2] / peak};
}

inline Vec3 color_coefficient(const Vec3& target, const Vec3& source) {
  Vec3 c;
  for (int i = 0; i < 3; ++i) {
    if (!(source[i] > 0.0)) {
      throw Error(ErrorCode::kDegenerateColor,
                  "source light color has a zero channel; cannot recolor");
    }
    c[i] = target[i] / source[i];
  }
  return c;
}

inline LinearImage relight(const LightPair& pair, const RelightParams& p) {
  validate(pair);
  validate(p);
  const Vec3 c = color_coefficient(p.color, pair.source_color);
  const Vec3 light = {p.gamma * c[0], p.gamma * c[1], p.gamma * c[2]};
  LinearImage out(pair.ambient.width(), pair.ambient.height());
  auto amb = pair.ambient.data();
  auto chg = pair.change.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = static_cast<float>(p.alpha * amb[i] + light[i % 3] * chg[i]);
  }
  return out;
}

inline std::vector<LinearImage> relight_sequence(const LightPair& pair,
                                                 const std::vector<RelightParams>& params) {
  std::vector<LinearImage> out(params.size());
  parallel_for(params.size(), [&](std::size_t i) { out[i] = relight(pair, params[i]); });
  return out;
}

// Value exceeded by a fraction `quantile` of all channel samples in the
// set (nearest rank). Renders are clamped to [0, E_max] afterwards.
inline double bound_outliers(const std::vector<LinearImage>& sample, double quantile) {
  if (sample.empty()) {
    throw Error(ErrorCode::kInvalidInput, "outlier bound needs at least one image");
  }
  if (!(quantile > 0.0 && quantile < 1.0)) {
    throw Error::invalid_field("quantile", "must lie in (0, 1)");
  }
  std::vector<float> pooled;
  for (const auto& img : sample) {
    pooled.insert(pooled.end(), img.values().begin(), img.values().end());
  }
  const std::size_t rank = upper_tail_rank(quantile, pooled.size());
  return select_rank(pooled, rank);
}

inline constexpr double kOutlierQuantile = 5e-4;

inline LinearImage clamp_radiance(const LinearImage& img, double e_max) {
  LinearImage out = img;
  const float bound = static_cast<float>(e_max);
  for (float& v : out.data()) v = std::min(v, bound);
  return out;
}

// Per-light linear renders of one synthetic view.
struct PerLightRenderSet {
  std::vector<LinearImage> light_renders;  // one light on, all else off
  std::vector<LinearImage> env_renders;    // all lights off, one per environment
  std::vector<std::string> light_ids;
  std::vector<std::string> env_ids;
  std::string view_id;
};

struct AmbientMix {
  std::vector<double> light_weights;  // one per light; the target entry is ignored
  std::vector<double> env_weights;    // one per environment render
};

// Combines renders into a pair: the target light becomes the change image,
// the weighted sum of environment and other light renders the ambient one.
// All renders are clamped to e_max first.
inline LightPair compose_synthetic(const PerLightRenderSet& set, std::size_t target_index,
                                   const AmbientMix& mix,
                                   double e_max = std::numeric_limits<double>::infinity()) {
  if (target_index >= set.light_renders.size()) {
    throw Error::invalid_field("target_index", "out of range");
  }
  if (mix.light_weights.size() != set.light_renders.size() ||
      mix.env_weights.size() != set.env_renders.size()) {
    throw Error(ErrorCode::kInvalidInput, "ambient mix weights do not match render counts");
  }
  const LinearImage& target = set.light_renders[target_index];
  auto check = [&](const LinearImage& img) {
    if (!img.same_size(target)) {
      throw Error(ErrorCode::kInvalidInput, "renders differ in size");
    }
  };
  LightPair pair;
  pair.domain = Domain::kSynthetic;
  pair.pair_id = set.view_id + "-" +
                 (target_index < set.light_ids.size() ? set.light_ids[target_index]
                                                      : "light" + std::to_string(target_index));
  pair.change = clamp_radiance(target, e_max);

  std::vector<double> acc(target.values().size(), 0.0);
  auto add = [&](const LinearImage& img, double w) {
    check(img);
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error::invalid_field("ambient_mix", "weights must be finite and >= 0");
    }
    if (w == 0.0) return;
    const float bound = static_cast<float>(e_max);
    auto d = img.data();
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * std::min(d[i], bound);
  };
  for (std::size_t i = 0; i < set.env_renders.size(); ++i) add(set.env_renders[i], mix.env_weights[i]);
  for (std::size_t i = 0; i < set.light_renders.size(); ++i) {
    if (i != target_index) add(set.light_renders[i], mix.light_weights[i]);
  }
  pair.ambient = LinearImage(target.width(), target.height());
  std::transform(acc.begin(), acc.end(), pair.ambient.data().begin(),
                 [](double v) { return static_cast<float>(v); });
  pair.source_color = estimate_source_color(pair.change);
  return pair;
}

struct AmbientMixConfig {
  double env_weight_min = 0.2;
  double env_weight_max = 1.0;
  double extra_light_probability = 0.5;
  double extra_light_weight_max = 0.5;
};

// Uniform env weights; at most one extra non-target light at weight
// <= extra_light_weight_max.
inline AmbientMix sample_ambient_mix(std::size_t n_lights, std::size_t n_env,
                                     std::size_t target_index, std::mt19937_64& rng,
                                     const AmbientMixConfig& cfg = {}) {
  auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  AmbientMix mix;
  mix.env_weights.resize(n_env);
  for (auto& w : mix.env_weights) {
    w = cfg.env_weight_min + (cfg.env_weight_max - cfg.env_weight_min) * unit();
  }
  mix.light_weights.assign(n_lights, 0.0);
  if (n_lights > 1 && unit() < cfg.extra_light_probability) {
    auto pick = static_cast<std::size_t>(unit() * static_cast<double>(n_lights - 1));
    pick = std::min(pick, n_lights - 2);
    if (pick >= target_index) ++pick;
    mix.light_weights[pick] = cfg.extra_light_weight_max * unit();
  }
  return mix;
}

}  // namespace relightkit
