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


#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "relightkit/color.hpp"
#include "relightkit/demosaic.hpp"
#include "relightkit/resize.hpp"
#include "test_util.hpp"

namespace relightkit {
namespace {

TEST(Image, RejectsEmptyAndMismatchedData) {
  EXPECT_THROW(SdrImage(0, 4), Error);
  EXPECT_THROW(SdrImage(3, 3, std::vector<std::uint8_t>(26)), Error);
  EXPECT_NO_THROW(SdrImage(3, 3, std::vector<std::uint8_t>(27)));
}

TEST(Image, LinearImageRejectsNegativeAndNonFinite) {
  EXPECT_THROW(LinearImage(1, 1, {0.f, -1e-6f, 0.f}), Error);
  EXPECT_THROW(LinearImage(1, 1, {0.f, NAN, 0.f}), Error);
  EXPECT_THROW(LinearImage(1, 1, {INFINITY, 0.f, 0.f}), Error);
  EXPECT_NO_THROW(LinearImage(1, 1, {0.f, 1e9f, 0.f}));
}

TEST(Image, InterleavedRowMajorIndexing) {
  SdrImage img(4, 2);
  img.at(3, 1, 2) = 7;
  EXPECT_EQ(img.values()[(1 * 4 + 3) * 3 + 2], 7);
}

TEST(BayerMosaic, RequiresEvenDimensions) {
  EXPECT_THROW(BayerMosaic(Plane(3, 4), CfaPattern::kRGGB), Error);
  EXPECT_NO_THROW(BayerMosaic(Plane(4, 4), CfaPattern::kRGGB));
}

TEST(Cfa, TilesMatchNames) {
  // (0,0) (1,0) / (0,1) (1,1)
  const struct {
    CfaPattern p;
    int c[4];
  } cases[] = {{CfaPattern::kRGGB, {0, 1, 1, 2}},
               {CfaPattern::kBGGR, {2, 1, 1, 0}},
               {CfaPattern::kGRBG, {1, 0, 2, 1}},
               {CfaPattern::kGBRG, {1, 2, 0, 1}}};
  for (const auto& t : cases) {
    EXPECT_EQ(parse_cfa(cfa_name(t.p)), t.p);
    EXPECT_EQ(cfa_channel(t.p, 0, 0), t.c[0]);
    EXPECT_EQ(cfa_channel(t.p, 1, 0), t.c[1]);
    EXPECT_EQ(cfa_channel(t.p, 0, 1), t.c[2]);
    EXPECT_EQ(cfa_channel(t.p, 1, 1), t.c[3]);
    EXPECT_EQ(cfa_channel(t.p, 2, 2), t.c[0]);
  }
  EXPECT_THROW(parse_cfa("RGBG"), Error);
}

TEST(Srgb, MidGrayEncodesTo188) {
  EXPECT_EQ(srgb_encode_value(0.5), 188);
  EXPECT_EQ(srgb_encode_value(0.0), 0);
  EXPECT_EQ(srgb_encode_value(1.0), 255);
  EXPECT_EQ(srgb_encode_value(2.0), 255);
}

TEST(Srgb, EveryCodeRoundTrips) {
  SdrImage img(256, 1);
  for (int i = 0; i < 256; ++i) {
    for (int c = 0; c < 3; ++c) img.at(i, 0, c) = static_cast<std::uint8_t>(i);
  }
  EXPECT_EQ(srgb_encode(srgb_decode(img)), img);
}

TEST(Srgb, TransferFunctionsInvert) {
  for (double v = 0.0; v <= 1.0; v += 1.0 / 64) {
    EXPECT_NEAR(srgb_eotf(srgb_oetf(v)), v, 1e-12);
  }
}

TEST(Srgb, QuantizationRoundsHalfUp) {
  EXPECT_EQ(quantize_unit(0.5 / 255.0), 1);
  EXPECT_EQ(quantize_unit(0.4999 / 255.0), 0);
  EXPECT_EQ(quantize_unit(-3.0), 0);
}

TEST(Luminance, Rec709Weights) {
  EXPECT_DOUBLE_EQ(luminance(Vec3{1, 1, 1}), 1.0);
  EXPECT_DOUBLE_EQ(luminance(Vec3{0, 1, 0}), 0.7152);
  SdrImage white(2, 2);
  for (auto& v : white.data()) v = 255;
  EXPECT_DOUBLE_EQ(mean_luma(white), 1.0);
}

// Same-color samples nearest to (x, y) inside its mirrored 3x3 window.
double demosaic_oracle(const Plane& raw, CfaPattern p, int x, int y, int c) {
  if (cfa_channel(p, x, y) == c) return raw.at(x, y);
  int best = 99;
  double sum = 0.0;
  int n = 0;
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      const int sx = detail::mirror(x + dx, raw.width());
      const int sy = detail::mirror(y + dy, raw.height());
      if (cfa_channel(p, sx, sy) != c) continue;
      const int d = dx * dx + dy * dy;
      if (d < best) {
        best = d;
        sum = 0.0;
        n = 0;
      }
      if (d == best) {
        sum += raw.at(sx, sy);
        ++n;
      }
    }
  }
  return sum / n;
}

TEST(Demosaic, MatchesNearestNeighborOracleForEveryPattern) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  for (auto p : {CfaPattern::kRGGB, CfaPattern::kBGGR, CfaPattern::kGRBG, CfaPattern::kGBRG}) {
    for (auto [w, h] : {std::pair{4, 4}, std::pair{2, 2}, std::pair{6, 4}}) {
      Plane raw(w, h);
      for (float& v : raw.data()) v = u(rng);
      const LinearImage out = demosaic_bilinear(BayerMosaic(raw, p));
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          for (int c = 0; c < 3; ++c) {
            EXPECT_FLOAT_EQ(out.at(x, y, c), static_cast<float>(demosaic_oracle(raw, p, x, y, c)))
                << cfa_name(p) << " " << w << "x" << h << " at " << x << "," << y << " c" << c;
          }
        }
      }
    }
  }
}

TEST(Demosaic, FlatFieldStaysFlat) {
  Plane raw(8, 6);
  for (int y = 0; y < 6; ++y) {
    for (int x = 0; x < 8; ++x) raw.at(x, y) = static_cast<float>(0.1 * (cfa_channel(CfaPattern::kRGGB, x, y) + 1));
  }
  const LinearImage out = demosaic_bilinear(BayerMosaic(raw, CfaPattern::kRGGB));
  for (int y = 0; y < 6; ++y) {
    for (int x = 0; x < 8; ++x) {
      EXPECT_FLOAT_EQ(out.at(x, y, 0), 0.1f);
      EXPECT_FLOAT_EQ(out.at(x, y, 1), 0.2f);
      EXPECT_FLOAT_EQ(out.at(x, y, 2), static_cast<float>(0.1 * 3));
    }
  }
}

TEST(Resize, UpsamplesRampWithHalfPixelCenters) {
  Plane src(2, 1, {0.0f, 1.0f});
  const Plane out = resize_bilinear<1>(src, 4, 1);
  EXPECT_FLOAT_EQ(out.at(0, 0), 0.0f);
  EXPECT_FLOAT_EQ(out.at(1, 0), 0.25f);
  EXPECT_FLOAT_EQ(out.at(2, 0), 0.75f);
  EXPECT_FLOAT_EQ(out.at(3, 0), 1.0f);
}

TEST(Resize, IdentityAndDownsampleAverage) {
  std::mt19937_64 rng(3);
  const LinearImage img = testing::random_linear(6, 4, rng);
  EXPECT_EQ(resize_bilinear(img, 6, 4), img);
  Plane src(4, 1, {0.0f, 1.0f, 2.0f, 3.0f});
  const Plane half = resize_bilinear<1>(src, 2, 1);
  EXPECT_FLOAT_EQ(half.at(0, 0), 0.5f);
  EXPECT_FLOAT_EQ(half.at(1, 0), 2.5f);
  EXPECT_THROW(resize_bilinear(img, 0, 4), Error);
}

TEST(Resize, FitLongEdge) {
  EXPECT_EQ(fit_long_edge(4000, 3000, 1024), (std::pair{1024, 768}));
  EXPECT_EQ(fit_long_edge(300, 200, 1024), (std::pair{300, 200}));
  EXPECT_EQ(fit_long_edge(10, 2000, 1024), (std::pair{5, 1024}));
}

}  // namespace
}  // namespace relightkit
