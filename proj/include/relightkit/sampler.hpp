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

// Training-pair sampling over an inflated grid.
//
// Each draw picks the component to modify (light with probability p_light,
// otherwise ambient), two distinct intensities of that component for the
// source and target frames, and one shared intensity of the other component
// and one color. Each side is independently snapped to an endpoint of its
// axis with probability p_endpoint, so p_endpoint = 1 yields on/off pairs.
// Draw i depends only on (seed, config, i).

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>

#include "relightkit/dataset.hpp"
#include "relightkit/manifest.hpp"

namespace relightkit {

struct SamplerConfig {
  double p_light = 0.5;
  double p_endpoint = 0.3;
  double p_condition_dropout = 0.1;
  std::uint64_t seed = 0;
};

inline void validate(const SamplerConfig& c) {
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(c.p_light)) throw Error::invalid_field("p_light", "must lie in [0, 1]");
  if (!prob(c.p_endpoint)) throw Error::invalid_field("p_endpoint", "must lie in [0, 1]");
  if (!prob(c.p_condition_dropout)) throw Error::invalid_field("p_condition_dropout", "must lie in [0, 1]");
}

enum class Component { kLight, kAmbient };

struct SampleDraw {
  Component component = Component::kLight;
  std::size_t source_index = 0;  // on the modified component's axis
  std::size_t target_index = 0;
  std::size_t other_index = 0;   // on the unchanged component's axis
  std::size_t color_index = 0;
  bool drop_conditions = false;
};

namespace detail {

class DrawStream {
 public:
  DrawStream(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    engine_.seed(seq);
  }

  // Uniform in [0, 1) from the top 53 bits.
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::size_t below(std::size_t n) {
    return std::min(static_cast<std::size_t>(unit() * static_cast<double>(n)), n - 1);
  }

  bool chance(double p) { return unit() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace detail

inline SampleDraw draw_sample(const GridSpec& grid, const SamplerConfig& cfg, std::uint64_t draw_index) {
  validate(cfg);
  detail::DrawStream rng(cfg.seed, draw_index);
  SampleDraw d;
  d.component = rng.chance(cfg.p_light) ? Component::kLight : Component::kAmbient;
  const auto& axis = d.component == Component::kLight ? grid.gammas : grid.alphas;
  const auto& other = d.component == Component::kLight ? grid.alphas : grid.gammas;
  if (axis.size() < 2) {
    throw Error(ErrorCode::kSampler, std::string("grid has fewer than two ") +
                                         (d.component == Component::kLight ? "light" : "ambient") +
                                         " intensities; cannot draw a change");
  }
  d.source_index = rng.below(axis.size());
  d.target_index = rng.below(axis.size() - 1);
  if (d.target_index >= d.source_index) ++d.target_index;

  const auto lo = static_cast<std::size_t>(std::min_element(axis.begin(), axis.end()) - axis.begin());
  const auto hi = static_cast<std::size_t>(std::max_element(axis.begin(), axis.end()) - axis.begin());
  const bool snap_source = rng.chance(cfg.p_endpoint);
  const bool snap_target = rng.chance(cfg.p_endpoint);
  if (snap_source) d.source_index = rng.chance(0.5) ? lo : hi;
  if (snap_target) d.target_index = rng.chance(0.5) ? lo : hi;
  if (d.source_index == d.target_index) {
    // Only a snap can collide; move the other side to the opposite endpoint.
    const std::size_t endpoint = d.source_index == lo ? hi : lo;
    if (snap_target && !snap_source) {
      d.source_index = endpoint;
    } else {
      d.target_index = endpoint;
    }
  }
  d.other_index = rng.below(other.size());
  d.color_index = rng.below(grid.colors.size());
  d.drop_conditions = rng.chance(cfg.p_condition_dropout);
  return d;
}

inline SampleRecord sample_training_pair(const InflationIndex& index, const SamplerConfig& cfg,
                                         std::uint64_t draw_index, ToneMapMode mode) {
  const SampleDraw d = draw_sample(index.grid, cfg, draw_index);
  GridPoint src;
  GridPoint tgt;
  src.color_index = tgt.color_index = d.color_index;
  if (d.component == Component::kLight) {
    src.alpha_index = tgt.alpha_index = d.other_index;
    src.gamma_index = d.source_index;
    tgt.gamma_index = d.target_index;
  } else {
    src.gamma_index = tgt.gamma_index = d.other_index;
    src.alpha_index = d.source_index;
    tgt.alpha_index = d.target_index;
  }
  SampleRecord r;
  r.id = index.pair_id + "-" + std::to_string(draw_index) + "-" + tonemap_mode_name(mode);
  r.pair_id = index.pair_id;
  r.source = index.grid.at(src.alpha_index, src.gamma_index, src.color_index);
  r.target = index.grid.at(tgt.alpha_index, tgt.gamma_index, tgt.color_index);
  r.delta_gamma = r.target.gamma - r.source.gamma;
  r.delta_alpha = r.target.alpha - r.source.alpha;
  r.color = r.target.color;
  r.tonemap_mode = mode;
  r.source_path = index.path(mode, src);
  r.target_path = index.path(mode, tgt);
  r.domain = index.domain;
  r.drop_conditions = d.drop_conditions;
  r.extra["component"] = d.component == Component::kLight ? "light" : "ambient";
  if (r.source.extrapolated() || r.target.extrapolated()) r.extra["extrapolated"] = true;
  return r;
}

}  // namespace relightkit
