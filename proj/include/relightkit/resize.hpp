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
#include <vector>

#include "relightkit/image.hpp"

namespace relightkit {

namespace detail {

struct Tap {
  int lo;
  int hi;
  double t;  // weight of `hi`
};

// Half-pixel-centered source taps along one axis, clamped to the edge.
inline std::vector<Tap> bilinear_taps(int in, int out) {
  std::vector<Tap> taps(out);
  const double ratio = static_cast<double>(in) / static_cast<double>(out);
  for (int i = 0; i < out; ++i) {
    double s = (i + 0.5) * ratio - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(in - 1));
    const int lo = static_cast<int>(std::floor(s));
    const int hi = std::min(lo + 1, in - 1);
    taps[i] = {lo, hi, s - lo};
  }
  return taps;
}

}  // namespace detail

template <int C>
Image<float, C> resize_bilinear(const Image<float, C>& src, int out_w,
                                int out_h) {
  if (out_w < 1 || out_h < 1) {
    throw Error(ErrorCode::kInvalidInput,
                "resize target must be at least 1x1");
  }
  if (out_w == src.width() && out_h == src.height()) return src;

  const auto xs = detail::bilinear_taps(src.width(), out_w);
  const auto ys = detail::bilinear_taps(src.height(), out_h);
  Image<float, C> out(out_w, out_h);
  for (int y = 0; y < out_h; ++y) {
    const auto& ty = ys[y];
    for (int x = 0; x < out_w; ++x) {
      const auto& tx = xs[x];
      for (int c = 0; c < C; ++c) {
        const double top = (1.0 - tx.t) * src.at(tx.lo, ty.lo, c) +
                           tx.t * src.at(tx.hi, ty.lo, c);
        const double bottom = (1.0 - tx.t) * src.at(tx.lo, ty.hi, c) +
                              tx.t * src.at(tx.hi, ty.hi, c);
        out.at(x, y, c) =
            static_cast<float>((1.0 - ty.t) * top + ty.t * bottom);
      }
    }
  }
  return out;
}

inline LinearImage resize_bilinear(const LinearImage& src, int out_w,
                                   int out_h) {
  const Image<float, 3>& base = src;
  auto resized = resize_bilinear<3>(base, out_w, out_h);
  LinearImage out(resized.width(), resized.height());
  std::copy(resized.values().begin(), resized.values().end(),
            out.data().begin());
  return out;
}

// Largest size with the same aspect ratio whose long edge is <= max_edge.
inline std::pair<int, int> fit_long_edge(int w, int h, int max_edge) {
  const int long_edge = std::max(w, h);
  if (long_edge <= max_edge) return {w, h};
  const double s = static_cast<double>(max_edge) / long_edge;
  return {std::max(1, static_cast<int>(std::lround(w * s))),
          std::max(1, static_cast<int>(std::lround(h * s)))};
}

}  // namespace relightkit
