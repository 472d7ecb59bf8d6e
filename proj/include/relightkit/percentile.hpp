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

// Nearest-rank order statistics. Ranks are 1-based; the small slack in the
// rank computation keeps products like 0.99 * 100 from rounding up a rank.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "relightkit/error.hpp"

namespace relightkit {

inline constexpr double kRankSlack = 1e-9;

// 1-based rank of the q-quantile: ceil(q * n), at least 1.
inline std::size_t lower_rank(double q, std::size_t n) {
  const double r = std::ceil(q * static_cast<double>(n) - kRankSlack);
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(r, 1.0)), 1, n);
}

// 1-based rank of the value exceeded by a fraction q of the samples:
// n - floor(q * n), at least 1.
inline std::size_t upper_tail_rank(double q, std::size_t n) {
  const double above = std::floor(q * static_cast<double>(n) + kRankSlack);
  const auto k = static_cast<std::size_t>(std::max(above, 0.0));
  return k >= n ? 1 : n - k;
}

// Selects the sample of the given 1-based rank; reorders `values`.
template <typename T>
T select_rank(std::vector<T>& values, std::size_t rank) {
  if (values.empty()) {
    throw Error(ErrorCode::kInvalidInput, "order statistic of an empty sample");
  }
  auto nth = values.begin() + static_cast<std::ptrdiff_t>(rank - 1);
  std::nth_element(values.begin(), nth, values.end());
  return *nth;
}

template <typename T>
T percentile_nearest_rank(std::vector<T> values, double q) {
  return select_rank(values, lower_rank(q, values.size()));
}

}  // namespace relightkit
