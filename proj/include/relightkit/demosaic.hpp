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

#include "relightkit/image.hpp"

namespace relightkit {

namespace detail {

// Mirror an out-of-range coordinate back into [0, n). Because the CFA has
// period 2, the mirrored sample carries the same color as the missing one,
// i.e. this is clamp-to-edge on each color's sub-lattice.
inline int mirror(int i, int n) {
  if (i < 0) return -i;
  if (i >= n) return 2 * n - 2 - i;
  return i;
}

}  // namespace detail

// Bilinear demosaic: native samples are copied, missing channels are the
// mean of the nearest same-color samples (4-neighbors for green, the row or
// column pair for red/blue at green sites, the diagonals otherwise).
inline LinearImage demosaic_bilinear(const BayerMosaic& mosaic) {
  const Plane& raw = mosaic.plane();
  const int w = raw.width();
  const int h = raw.height();
  const CfaPattern cfa = mosaic.pattern();
  auto sample = [&](int x, int y) -> double {
    return raw.at(detail::mirror(x, w), detail::mirror(y, h));
  };

  LinearImage out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int native = cfa_channel(cfa, x, y);
      for (int c = 0; c < 3; ++c) {
        double v;
        if (c == native) {
          v = raw.at(x, y);
        } else if (c == 1) {
          v = (sample(x - 1, y) + sample(x + 1, y) + sample(x, y - 1) +
               sample(x, y + 1)) /
              4.0;
        } else if (native == 1) {
          if (cfa_channel(cfa, x + 1, y) == c) {
            v = (sample(x - 1, y) + sample(x + 1, y)) / 2.0;
          } else {
            v = (sample(x, y - 1) + sample(x, y + 1)) / 2.0;
          }
        } else {
          v = (sample(x - 1, y - 1) + sample(x + 1, y - 1) +
               sample(x - 1, y + 1) + sample(x + 1, y + 1)) /
              4.0;
        }
        out.at(x, y, c) = static_cast<float>(v);
      }
    }
  }
  return out;
}

}  // namespace relightkit
