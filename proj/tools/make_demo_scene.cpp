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

// Writes a small procedural scene for trying the pipeline end to end:
//
//   <out>/capture/on_raw.pfm  + .meta   mosaic with the lamp on
//   <out>/capture/off_raw.pfm + .meta   mosaic with the lamp off
//   <out>/capture/mask.png              lamp mask
//   <out>/capture/depth.pfm             depth plane
//   <out>/renders/view0/lights/*.pfm    per-light linear renders
//   <out>/renders/view0/env/*.pfm       environment-only renders

#include <cmath>
#include <filesystem>
#include <iostream>
#include <random>

#include "CLI11.hpp"
#include "relightkit/relightkit.hpp"

namespace fs = std::filesystem;
using namespace relightkit;

namespace {

// Soft wall gradient with a darker floor band.
LinearImage ambient_field(int w, int h, const Vec3& tint, double level) {
  LinearImage img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double u = (x + 0.5) / w;
      const double v = (y + 0.5) / h;
      const double base = level * (0.6 + 0.4 * u) * (v > 0.7 ? 0.5 : 1.0);
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = static_cast<float>(base * tint[c]);
    }
  }
  return img;
}

// Lamp: a bright disc plus falloff over the scene.
LinearImage lamp_field(int w, int h, double cx, double cy, const Vec3& color, double power) {
  LinearImage img(w, h);
  const double r0 = 0.06 * std::min(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double dx = x + 0.5 - cx;
      const double dy = y + 0.5 - cy;
      const double d2 = dx * dx + dy * dy;
      const double v = d2 < r0 * r0 ? 8.0 : power * r0 * r0 / (d2 + r0 * r0);
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = static_cast<float>(v * color[c]);
    }
  }
  return img;
}

LinearImage add(const LinearImage& a, const LinearImage& b) {
  LinearImage out(a.width(), a.height());
  for (std::size_t i = 0; i < out.values().size(); ++i) out.data()[i] = a.values()[i] + b.values()[i];
  return out;
}

// Inverts white balance and exposure and samples the CFA.
Plane mosaic(const LinearImage& radiance, const RawMeta& meta, double noise, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, noise);
  Plane out(radiance.width(), radiance.height());
  const double p = exposure_product(meta);
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      const int c = cfa_channel(meta.cfa, x, y);
      const double v = radiance.at(x, y, c) / meta.wb_gains[c] * p + (noise > 0 ? n(rng) : 0.0);
      out.at(x, y) = static_cast<float>(std::max(0.0, v));
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Write a procedural demo scene"};
  std::string out_dir;
  int width = 128, height = 96;
  std::uint64_t seed = 1;
  double noise = 0.0;
  app.add_option("--out", out_dir, "Output directory")->required();
  app.add_option("--width", width, "Width (even)");
  app.add_option("--height", height, "Height (even)");
  app.add_option("--seed", seed, "Noise seed");
  app.add_option("--noise", noise, "Raw noise standard deviation");
  CLI11_PARSE(app, argc, argv);

  try {
    if (width < 16 || height < 16 || width % 2 || height % 2) {
      throw Error::invalid_field("width/height", "must be even and at least 16");
    }
    std::mt19937_64 rng(seed);
    const fs::path cap = fs::path(out_dir) / "capture";
    fs::create_directories(cap);

    const double lx = 0.3 * width, ly = 0.35 * height;
    const LinearImage amb = ambient_field(width, height, {0.55, 0.7, 1.0}, 0.05);
    const LinearImage lamp = lamp_field(width, height, lx, ly, blackbody_rgb(2700), 1.5);

    RawMeta off;
    off.exposure_time = 1.0 / 15;
    off.analog_gain = 4.0;
    off.digital_gain = 1.0;
    off.wb_gains = {1.6, 1.0, 2.1};
    RawMeta on = off;
    on.exposure_time = 1.0 / 60;
    on.analog_gain = 2.0;
    on.wb_gains = {1.3, 1.0, 2.4};
    // Calibration applies gains interpolated at gamma_ref = 1, i.e. on's.
    RawMeta synth_off = off;
    synth_off.wb_gains = on.wb_gains;

    write_pfm_plane(mosaic(add(amb, lamp), on, noise, rng), cap / "on_raw.pfm");
    write_raw_meta(on, cap / "on_raw.meta");
    write_pfm_plane(mosaic(amb, synth_off, noise, rng), cap / "off_raw.pfm");
    write_raw_meta(off, cap / "off_raw.meta");

    GrayImage mask(width, height);
    Plane depth(width, height);
    const double r = 0.12 * std::min(width, height);
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        const double dx = x + 0.5 - lx, dy = y + 0.5 - ly;
        mask.at(x, y) = dx * dx + dy * dy < r * r ? 255 : 0;
        depth.at(x, y) = static_cast<float>(1.0 + 3.0 * (1.0 - (y + 0.5) / height));
      }
    }
    write_png(mask, cap / "mask.png");
    write_pfm_plane(depth, cap / "depth.pfm");

    const fs::path view = fs::path(out_dir) / "renders" / "view0";
    fs::create_directories(view / "lights");
    fs::create_directories(view / "env");
    write_pfm(lamp, view / "lights" / "lamp.pfm");
    write_pfm(lamp_field(width, height, 0.8 * width, 0.3 * height, blackbody_rgb(5000), 2.0),
              view / "lights" / "sconce.pfm");
    write_pfm(ambient_field(width, height, {0.6, 0.75, 1.0}, 0.4), view / "env" / "sky.pfm");
    write_pfm(ambient_field(width, height, {1.0, 0.85, 0.7}, 0.2), view / "env" / "sunset.pfm");
    std::cout << "wrote demo scene to " << out_dir << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
