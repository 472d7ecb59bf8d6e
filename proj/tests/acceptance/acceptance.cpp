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


// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails. Tolerances and time limits are fixed below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "relightkit/relightkit.hpp"
#include "../unit/test_util.hpp"

using namespace relightkit;
namespace fs = std::filesystem;

namespace {

constexpr double kEndpointRelTol = 1e-6;
constexpr double kEndpointSeconds = 1.0;
constexpr int kPropertyPairs = 1000;
constexpr int kPropertySize = 32;
constexpr double kAdditivityRelTol = 1e-5;
constexpr double kPropertySeconds = 10.0;
constexpr int kCalibrationPairs = 100;
constexpr double kResidualRelTol = 1e-12;
constexpr double kCalibrationSeconds = 5.0;
constexpr double kToneMapMonotoneTol = 0.01;  // mean luma on [0, 1]
constexpr double kToneMapFlatRatio = 5.0;
constexpr std::size_t kOutlierSamples = 1000000;
constexpr double kPsnrTol = 0.01;
constexpr double kSsimWindowTol = 1e-6;
constexpr int kFrequencyDraws = 100000;
constexpr double kFrequencySigmas = 3.0;
constexpr int kManifestRecords = 10000;

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Check {
 public:
  // Records a failed condition; keeps the first message.
  void require(bool ok, const std::string& what) {
    if (!ok && pass_) {
      pass_ = false;
      first_failure_ = what;
    }
  }
  void note(const std::string& s) { notes_ += (notes_.empty() ? "" : " ") + s; }
  Outcome outcome() const { return {pass_, pass_ ? notes_ : first_failure_ + " | " + notes_}; }

 private:
  bool pass_ = true;
  std::string first_failure_;
  std::string notes_;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Vec3 random_color(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  Vec3 c = {u(rng), u(rng), u(rng)};
  c[std::uniform_int_distribution<int>(0, 2)(rng)] = 1.0;
  return c;
}

LightPair random_pair(int w, int h, std::mt19937_64& rng) {
  LightPair p;
  p.pair_id = "random";
  p.ambient = testing::random_linear(w, h, rng, 2.0);
  p.change = testing::random_linear(w, h, rng, 4.0);
  p.source_color = random_color(rng);
  return p;
}

double max_abs(const LinearImage& img) {
  double m = 0.0;
  for (float v : img.values()) m = std::max(m, static_cast<double>(std::abs(v)));
  return m;
}

double max_abs_diff(const LinearImage& a, const LinearImage& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) {
    m = std::max(m, std::abs(static_cast<double>(a.values()[i]) - b.values()[i]));
  }
  return m;
}

LinearImage sum(const LinearImage& a, const LinearImage& b) {
  LinearImage out(a.width(), a.height());
  for (std::size_t i = 0; i < out.values().size(); ++i) out.data()[i] = a.values()[i] + b.values()[i];
  return out;
}

// Dim textured room with one bright lamp that dominates when on.
LightPair lamp_scene(int w, int h) {
  LightPair p;
  p.pair_id = "lamp-scene";
  p.ambient = LinearImage(w, h);
  p.change = LinearImage(w, h);
  const double cx = 0.35 * w, cy = 0.4 * h, r0 = 0.08 * std::min(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double tex = 0.75 + 0.25 * std::sin(0.7 * x) * std::cos(0.5 * y);
      const double dx = x + 0.5 - cx, dy = y + 0.5 - cy;
      const double fall = 3.0 * r0 * r0 / (dx * dx + dy * dy + r0 * r0);
      const Vec3 amb = {0.010, 0.013, 0.020};
      const Vec3 lamp = {1.0, 0.7, 0.4};
      for (int c = 0; c < 3; ++c) {
        p.ambient.at(x, y, c) = static_cast<float>(amb[c] * tex);
        p.change.at(x, y, c) = static_cast<float>(lamp[c] * fall * tex);
      }
    }
  }
  p.source_color = estimate_source_color(p.change);
  return p;
}

// ---------------------------------------------------------------------------

Outcome relight_endpoints() {
  Check chk;
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(11);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const LightPair p = random_pair(64, 48, rng);
    const double scale = std::max(max_abs(p.ambient), max_abs(p.change));
    const LinearImage amb = relight(p, {1.0, 0.0, random_color(rng)});
    const LinearImage full = relight(p, {1.0, 1.0, p.source_color});
    const LinearImage zero = relight(p, {0.0, 0.0, random_color(rng)});
    const double e1 = max_abs_diff(amb, p.ambient) / scale;
    const double e2 = max_abs_diff(full, sum(p.ambient, p.change)) / scale;
    worst = std::max({worst, e1, e2});
    chk.require(e1 <= kEndpointRelTol, "(1,0) differs from ambient by " + fmt(e1));
    chk.require(e2 <= kEndpointRelTol, "(1,1) differs from ambient+change by " + fmt(e2));
    chk.require(max_abs(zero) == 0.0, "(0,0) is not zero");
  }
  const double secs = seconds_since(t0);
  chk.require(secs < kEndpointSeconds, "took " + fmt(secs) + " s");
  chk.note("max_rel_err=" + fmt(worst) + " time=" + fmt(secs) + "s");
  return chk.outcome();
}

Outcome linearity_monotonicity() {
  Check chk;
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> half(0.0, 0.5);
  double worst = 0.0;
  std::size_t order_violations = 0;
  for (int i = 0; i < kPropertyPairs; ++i) {
    const LightPair p = random_pair(kPropertySize, kPropertySize, rng);
    const Vec3 c = random_color(rng);
    const double a1 = half(rng), a2 = half(rng), g1 = half(rng), g2 = half(rng);
    const LinearImage joint = relight(p, {a1 + a2, g1 + g2, c});
    const LinearImage parts = sum(relight(p, {a1, g1, c}), relight(p, {a2, g2, c}));
    const double scale = std::max(max_abs(joint), 1e-30);
    // Separately in each argument.
    const LinearImage alpha_sum = sum(relight(p, {a1, 0.0, c}), relight(p, {a2, 0.0, c}));
    const LinearImage gamma_sum = sum(relight(p, {0.0, g1, c}), relight(p, {0.0, g2, c}));
    const double e = std::max({max_abs_diff(joint, parts) / scale,
                               max_abs_diff(relight(p, {a1 + a2, 0.0, c}), alpha_sum) / scale,
                               max_abs_diff(relight(p, {0.0, g1 + g2, c}), gamma_sum) / scale});
    worst = std::max(worst, e);
    chk.require(e <= kAdditivityRelTol, "additivity error " + fmt(e) + " on pair " + std::to_string(i));

    std::vector<double> gammas = {half(rng), half(rng), half(rng) + 0.5, 1.0, 0.0};
    std::sort(gammas.begin(), gammas.end());
    LinearImage prev = relight(p, {a1, gammas[0], c});
    for (std::size_t k = 1; k < gammas.size(); ++k) {
      const LinearImage next = relight(p, {a1, gammas[k], c});
      for (std::size_t j = 0; j < next.values().size(); ++j) {
        if (next.values()[j] < prev.values()[j]) ++order_violations;
      }
      prev = next;
    }
  }
  chk.require(order_violations == 0, std::to_string(order_violations) + " pixels decrease as gamma grows");
  const double secs = seconds_since(t0);
  chk.require(secs < kPropertySeconds, "took " + fmt(secs) + " s");
  chk.note("pairs=" + std::to_string(kPropertyPairs) + " max_rel_err=" + fmt(worst) +
           " monotone_violations=" + std::to_string(order_violations) + " time=" + fmt(secs) + "s");
  return chk.outcome();
}

// Two passes: materialize the signed residual, then reduce it.
ResidualStats residual_oracle(const LinearImage& on, const LinearImage& off) {
  std::vector<double> diff(on.values().size());
  for (std::size_t i = 0; i < diff.size(); ++i) {
    diff[i] = static_cast<double>(on.values()[i]) - static_cast<double>(off.values()[i]);
  }
  double neg = 0.0, pos = 0.0;
  std::size_t count = 0;
  for (double d : diff) {
    if (d < 0.0) {
      neg += d * d;
      ++count;
    } else {
      pos += d * d;
    }
  }
  return {std::sqrt(neg) / std::sqrt(pos), 100.0 * count / diff.size()};
}

Outcome calibration() {
  Check chk;
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> t(1e-4, 0.5), g(1.0, 16.0), wb(0.5, 3.0);
  for (int i = 0; i < 200; ++i) {
    RawMeta off, on;
    off.exposure_time = t(rng);
    off.analog_gain = g(rng);
    off.digital_gain = g(rng) / 4;
    on.exposure_time = t(rng);
    on.analog_gain = g(rng);
    on.digital_gain = g(rng) / 4;
    off.wb_gains = {wb(rng), 1.0, wb(rng)};
    on.wb_gains = {wb(rng), 1.0, wb(rng)};
    chk.require(relit_exposure_product(off, on, 1.0, 0.0) == exposure_product(off), "P_relit(1,0) != P_off");
    chk.require(relit_exposure_product(off, on, 1.0, 1.0) == exposure_product(on), "P_relit(1,1) != P_on");
    chk.require(relit_exposure_product(off, on, 0.3, 1.0) == exposure_product(on), "P_relit(a,1) != P_on");
    chk.require(interp_wb(off.wb_gains, on.wb_gains, 0.0) == off.wb_gains, "WB(0) != off gains");
    chk.require(interp_wb(off.wb_gains, on.wb_gains, 1.0) == on.wb_gains, "WB(1) != on gains");
  }
  double worst = 0.0;
  for (int i = 0; i < kCalibrationPairs; ++i) {
    const LinearImage off = testing::random_linear(48, 40, rng, 1.0);
    LinearImage on = testing::random_linear(48, 40, rng, 1.0);
    for (float& v : on.data()) v += 0.3f;
    const ResidualStats got = residual_stats(on, off);
    const ResidualStats want = residual_oracle(on, off);
    const double e = std::abs(got.relative_error - want.relative_error) / want.relative_error;
    worst = std::max(worst, e);
    chk.require(e <= kResidualRelTol, "relative_error mismatch " + fmt(e));
    chk.require(got.pct_negative == want.pct_negative, "pct_negative mismatch");
  }
  const double secs = seconds_since(t0);
  chk.require(secs < kCalibrationSeconds, "took " + fmt(secs) + " s");
  chk.note("residual_pairs=" + std::to_string(kCalibrationPairs) + " max_rel_err=" + fmt(worst) +
           " time=" + fmt(secs) + "s");
  return chk.outcome();
}

Outcome disentanglement() {
  Check chk;
  std::mt19937_64 rng(14);
  const float specials[] = {0.0f, 1e-38f, 1e-45f, 1.0f, 65504.0f, 3.0e38f};
  for (int i = 0; i < 100; ++i) {
    // on < off everywhere, including denormal and huge magnitudes.
    LinearImage off = testing::random_linear(33, 17, rng, 10.0);
    for (std::size_t k = 0; k < off.values().size(); k += 7) off.data()[k] = specials[k % 6] + 1.0f;
    LinearImage on = off;
    for (std::size_t k = 0; k < on.values().size(); ++k) {
      on.data()[k] = std::nextafter(off.values()[k], 0.0f) * (k % 3 == 0 ? 0.5f : 1.0f);
    }
    const Disentangled d = disentangle(on, off);
    chk.require(max_abs(d.change) == 0.0, "on < off did not give a zero change image");
    chk.require(d.ambient == off, "ambient is not the off image");
    // All-negative residual: the ratio is undefined and reported as such.
    bool undefined = false;
    try {
      residual_stats(on, off);
    } catch (const Error& err) {
      undefined = err.code() == ErrorCode::kUndefinedRatio;
    }
    chk.require(undefined, "all-negative residual did not report an undefined ratio");
    LinearImage one_up = on;
    one_up.data()[1] = off.values()[1] + 1.0f;
    const ResidualStats s = residual_stats(one_up, off);
    const double n = static_cast<double>(on.values().size());
    chk.require(s.pct_negative == 100.0 * (n - 1) / n, "pct_negative wrong when on < off");

    // on >= off: no clipping, residual stats zero.
    LinearImage up = off;
    for (std::size_t k = 0; k < up.values().size(); ++k) up.data()[k] = k % 2 ? off.values()[k] : off.values()[k] * 2;
    const Disentangled e = disentangle(up, off);
    for (float v : e.change.values()) chk.require(v >= 0.0f, "negative change value");
    const ResidualStats z = residual_stats(up, off);
    chk.require(z.relative_error == 0.0 && z.pct_negative == 0.0, "non-zero clip statistics when on >= off");
  }
  // Mixed signs: never negative.
  const LinearImage a = testing::random_linear(64, 64, rng), b = testing::random_linear(64, 64, rng);
  for (float v : disentangle(a, b).change.values()) chk.require(v >= 0.0f && !std::isnan(v), "negative output");
  chk.note("adversarial_pairs=100");
  return chk.outcome();
}

std::size_t count_lines(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) ++n;
  }
  return n;
}

Outcome inflation_counts() {
  Check chk;
  std::mt19937_64 rng(15);
  testing::TempDir dir;
  LightPair real = random_pair(48, 32, rng);
  real.pair_id = "real";
  LightPair synth = random_pair(48, 32, rng);
  synth.pair_id = "synth";
  synth.domain = Domain::kSynthetic;
  const ToneMapSpec spec;
  std::string detail;
  for (auto [pair, grid, want] : {std::tuple{&real, real_default_grid(), kRealInflationFactor},
                                  std::tuple{&synth, synthetic_default_grid(), kSyntheticInflationFactor}}) {
    const Inflation inf = inflate(*pair, grid, spec, {ToneMapMode::kTogether});
    write_inflation(*pair, grid, inf, dir / pair->pair_id);
    const std::size_t rows = count_lines(dir / pair->pair_id / "frames.jsonl");
    std::size_t pngs = 0;
    for (const auto& e : fs::recursive_directory_iterator(dir / pair->pair_id)) {
      if (e.path().extension() == ".png") ++pngs;
    }
    chk.require(grid.size() == want && inf.frames.size() == want,
                pair->pair_id + " emitted " + std::to_string(inf.frames.size()) + " frames");
    chk.require(rows == inf.frames.size() && pngs == rows, pair->pair_id + " manifest rows " +
                                                               std::to_string(rows) + " vs frames " +
                                                               std::to_string(pngs));
    detail += pair->pair_id + "=" + std::to_string(inf.frames.size()) + "/" + std::to_string(rows) + " ";
  }
  chk.note(detail + "(frames/manifest rows)");
  return chk.outcome();
}

Outcome tonemap_behavior() {
  Check chk;
  const LightPair pair = lamp_scene(96, 64);
  std::vector<RelightParams> params;
  for (int i = 0; i <= 10; ++i) params.push_back({1.0, i / 10.0, kNeutral});
  ToneMapSpec together;
  ToneMapSpec separate;
  separate.mode = ToneMapMode::kSeparate;
  const auto tog = tonemap(pair, params, together);
  const auto sep = tonemap(pair, params, separate);
  std::vector<double> mt, ms;
  for (const auto& f : tog.frames) mt.push_back(mean_luma(f));
  for (const auto& f : sep.frames) ms.push_back(mean_luma(f));
  for (std::size_t i = 1; i < mt.size(); ++i) {
    chk.require(mt[i] >= mt[i - 1] - kToneMapMonotoneTol,
                "together mean luma drops at gamma=" + fmt(params[i].gamma));
  }
  const double range = *std::max_element(mt.begin(), mt.end()) - *std::min_element(mt.begin(), mt.end());
  double mean = 0.0;
  for (double v : ms) mean += v;
  mean /= ms.size();
  double var = 0.0;
  for (double v : ms) var += (v - mean) * (v - mean);
  var /= ms.size();
  chk.require(var * kToneMapFlatRatio <= range, "separate variance " + fmt(var) + " vs together range " + fmt(range));
  chk.note("together_luma=[" + fmt(mt.front()) + ".." + fmt(mt.back()) + "] range=" + fmt(range) +
           " separate_var=" + fmt(var) + " ratio=" + fmt(range / std::max(var, 1e-300)));
  return chk.outcome();
}

Outcome outlier_bound() {
  Check chk;
  std::mt19937_64 rng(16);
  std::lognormal_distribution<float> heavy(0.0f, 2.0f);
  // Raw order statistic on exactly 10^6 samples, with ties.
  std::vector<float> samples(kOutlierSamples);
  for (auto& v : samples) v = std::round(heavy(rng) * 64.0f) / 64.0f;
  std::vector<float> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t exceed = static_cast<std::size_t>(kOutlierQuantile * kOutlierSamples);
  const float want = sorted[kOutlierSamples - exceed - 1];
  std::vector<float> work = samples;
  const float got = select_rank(work, upper_tail_rank(kOutlierQuantile, kOutlierSamples));
  chk.require(got == want, "select_rank " + fmt(got) + " vs sort " + fmt(want));

  // Through the render-set API: two images, 1,000,002 channel samples.
  std::vector<LinearImage> renders(2, LinearImage(166667, 1));
  for (auto& img : renders) {
    for (float& v : img.data()) v = heavy(rng);
  }
  std::vector<float> pooled;
  for (const auto& img : renders) pooled.insert(pooled.end(), img.values().begin(), img.values().end());
  std::sort(pooled.begin(), pooled.end());
  const std::size_t n = pooled.size();
  const float want2 = pooled[n - static_cast<std::size_t>(std::floor(kOutlierQuantile * n)) - 1];
  const double e_max = bound_outliers(renders, kOutlierQuantile);
  chk.require(e_max == want2, "bound_outliers " + fmt(e_max) + " vs sort " + fmt(want2));
  std::size_t above = 0;
  for (float v : pooled) above += v > e_max;
  chk.note("quantile=" + fmt(kOutlierQuantile) + " n=" + std::to_string(kOutlierSamples) + " e_max=" + fmt(got) +
           " render_set_e_max=" + fmt(e_max) + " above=" + std::to_string(above));
  return chk.outcome();
}

SdrImage constant_sdr(int w, int h, std::uint8_t v) {
  SdrImage img(w, h);
  std::fill(img.data().begin(), img.data().end(), v);
  return img;
}

Outcome metrics_oracle() {
  Check chk;
  std::mt19937_64 rng(17);
  // Uniform offset of 16 on an unclipped image.
  SdrImage a(64, 64);
  std::uniform_int_distribution<int> u(0, 200);
  for (auto& v : a.data()) v = static_cast<std::uint8_t>(u(rng));
  SdrImage b = a;
  for (auto& v : b.data()) v = static_cast<std::uint8_t>(v + 16);
  const double closed = 20.0 * std::log10(255.0 / 16.0);
  const double p = psnr(a, b);
  chk.require(std::abs(p - closed) <= kPsnrTol, "psnr " + fmt(p) + " vs closed form " + fmt(closed));
  chk.require(ssim(a, a) == 1.0, "ssim(a,a) != 1");
  const SdrImage r = testing::random_sdr(40, 30, rng);
  chk.require(ssim(r, r) == 1.0, "ssim(r,r) != 1");

  // One 11x11 window of constants: only the luminance term is active.
  const SdrImage x = constant_sdr(11, 11, 90), y = constant_sdr(11, 11, 120);
  const double c1 = std::pow(0.01 * 255.0, 2);
  const double want = (2.0 * 90 * 120 + c1) / (90.0 * 90 + 120.0 * 120 + c1);
  const double s = ssim(x, y);
  chk.require(std::abs(s - want) <= kSsimWindowTol, "single-window ssim " + fmt(s) + " vs " + fmt(want));
  // One window, structured: constant vs step edge, moments by hand.
  SdrImage edge(11, 11);
  for (int yy = 0; yy < 11; ++yy) {
    for (int xx = 0; xx < 11; ++xx) {
      for (int c = 0; c < 3; ++c) edge.at(xx, yy, c) = xx < 5 ? 40 : 200;
    }
  }
  const auto& k = ssim_kernel_1d();
  double mu = 0.0, m2 = 0.0;
  for (int xx = 0; xx < 11; ++xx) {
    const double v = xx < 5 ? 40.0 : 200.0;
    mu += k[xx] * v;
    m2 += k[xx] * v * v;
  }
  const double var = m2 - mu * mu;
  const double c2 = std::pow(0.03 * 255.0, 2);
  const double want_edge = ((2 * mu * 90 + c1) * c2) / ((mu * mu + 90.0 * 90 + c1) * (var + c2));
  const double s_edge = ssim(edge, x);
  chk.require(std::abs(s_edge - want_edge) <= kSsimWindowTol, "edge ssim " + fmt(s_edge) + " vs " + fmt(want_edge));
  chk.note("psnr16=" + fmt(p) + " closed_form=" + fmt(closed) + " ssim_window=" +
           fmt(s) + "/" + fmt(want) + " edge=" + fmt(s_edge) + "/" + fmt(want_edge));
  return chk.outcome();
}

Outcome conditioning() {
  Check chk;
  std::mt19937_64 rng(18);
  // Packs.
  const int w = 40, h = 30;
  Plane mask(w, h), depth(w, h);
  for (int yy = 0; yy < h; ++yy) {
    for (int xx = 0; xx < w; ++xx) {
      mask.at(xx, yy) = (xx - 20) * (xx - 20) + (yy - 12) * (yy - 12) < 64 ? 1.0f : 0.0f;
      depth.at(xx, yy) = static_cast<float>(yy) / (h - 1);
    }
  }
  const SdrImage src = testing::random_sdr(w, h, rng);
  SampleRecord rec;
  rec.id = "r";
  rec.source = {1.0, 0.3, {1.0, 0.6, 0.3}};
  rec.target = {1.0, 1.0, {1.0, 0.6, 0.3}};
  rec.delta_gamma = 0.7;
  rec.color = rec.target.color;
  const auto pack = build_conditioning(rec, src, mask, depth, w, h);
  const auto planes = pack.spatial_planes();
  chk.require(planes.size() == 8, "pack has " + std::to_string(planes.size()) + " spatial planes");
  std::size_t off_mask_nonzero = 0;
  for (int yy = 0; yy < h; ++yy) {
    for (int xx = 0; xx < w; ++xx) {
      if (mask.at(xx, yy) != 0.0f) continue;
      for (int c = 3; c < 7; ++c) off_mask_nonzero += planes[c].at(xx, yy) != 0.0f;
    }
  }
  chk.require(off_mask_nonzero == 0, std::to_string(off_mask_nonzero) + " non-zero off-mask values");

  for (int K : {1, 4, 8, 16}) {
    const auto f = fourier_features(0.0, K);
    bool exact = f.size() == static_cast<std::size_t>(2 * K);
    for (int i = 0; exact && i < K; ++i) exact = f[2 * i] == 0.0 && f[2 * i + 1] == 1.0;
    chk.require(exact, "fourier_features(0) is not (0,1)x" + std::to_string(K));
  }

  // Replay.
  const GridSpec grid = real_default_grid();
  const InflationIndex index = index_for_grid("p", Domain::kReal, grid, {ToneMapMode::kTogether});
  SamplerConfig cfg;
  cfg.seed = 1234;
  bool replay = true;
  for (std::uint64_t i = 0; i < 2000; ++i) {
    replay = replay && sample_training_pair(index, cfg, i, ToneMapMode::kTogether) ==
                           sample_training_pair(index, cfg, i, ToneMapMode::kTogether);
  }
  std::vector<SampleRecord> first, second;
  for (std::uint64_t i = 0; i < 500; ++i) first.push_back(sample_training_pair(index, cfg, i, ToneMapMode::kTogether));
  for (std::uint64_t i = 500; i-- > 0;) second.push_back(sample_training_pair(index, cfg, i, ToneMapMode::kTogether));
  std::reverse(second.begin(), second.end());
  replay = replay && first == second;
  chk.require(replay, "sampler replay differs under a fixed seed");

  // Component frequency.
  std::string freq;
  for (double p_light : {0.5, 0.3, 0.8}) {
    SamplerConfig c;
    c.seed = 99;
    c.p_light = p_light;
    std::size_t lights = 0;
    for (int i = 0; i < kFrequencyDraws; ++i) lights += draw_sample(grid, c, i).component == Component::kLight;
    const double mean = kFrequencyDraws * p_light;
    const double sigma = std::sqrt(kFrequencyDraws * p_light * (1 - p_light));
    const double z = (lights - mean) / sigma;
    chk.require(std::abs(z) <= kFrequencySigmas, "p_light=" + fmt(p_light) + " off by " + fmt(z) + " sigma");
    freq += " z(" + fmt(p_light) + ")=" + fmt(z);
  }
  chk.note("planes=8 off_mask_nonzero=0 replay=ok" + freq);
  return chk.outcome();
}

Outcome io_round_trips() {
  Check chk;
  std::mt19937_64 rng(19);
  testing::TempDir dir;
  for (int i = 0; i < 20; ++i) {
    std::uniform_int_distribution<int> dim(1, 70);
    const int w = dim(rng), h = dim(rng);
    LinearImage img = testing::random_linear(w, h, rng, 1e6);
    img.data()[0] = 1e-42f;  // denormal
    write_pfm(img, dir / "a.pfm");
    const LinearImage back = read_pfm(dir / "a.pfm");
    chk.require(std::memcmp(back.values().data(), img.values().data(), img.values().size() * 4) == 0 &&
                    back.width() == w && back.height() == h,
                "PFM round trip not bit-exact");
    write_pfm(back, dir / "b.pfm");
    std::ifstream fa(dir / "a.pfm", std::ios::binary), fb(dir / "b.pfm", std::ios::binary);
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    chk.require(sa.str() == sb.str(), "PFM re-encode differs");

    const SdrImage sdr = testing::random_sdr(w, h, rng);
    write_png(sdr, dir / "a.png");
    chk.require(read_png(dir / "a.png") == sdr, "PNG round trip not bit-exact");
    chk.require(encode_png(decode_png(encode_png(sdr))) == encode_png(sdr), "PNG re-encode differs");
  }

  std::vector<SampleRecord> recs(kManifestRecords);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < kManifestRecords; ++i) {
    auto& r = recs[i];
    r.id = "pair" + std::to_string(i % 37) + "-" + std::to_string(i);
    r.pair_id = "pair" + std::to_string(i % 37);
    const Vec3 c = random_color(rng);
    // One component changes per record.
    const double keep = u(rng);
    r.source = i % 2 ? RelightParams{keep, u(rng), c} : RelightParams{u(rng), keep, c};
    r.target = i % 2 ? RelightParams{keep, u(rng), c} : RelightParams{u(rng), keep, c};
    r.delta_gamma = r.target.gamma - r.source.gamma;
    r.delta_alpha = r.target.alpha - r.source.alpha;
    r.color = c;
    r.tonemap_mode = i % 2 ? ToneMapMode::kSeparate : ToneMapMode::kTogether;
    r.source_path = "together/a" + std::to_string(i) + ".png";
    r.target_path = "together/b" + std::to_string(i) + ".png";
    r.domain = i % 3 ? Domain::kReal : Domain::kSynthetic;
    r.drop_conditions = i % 10 == 0;
    if (i % 5 == 0) r.extra["component"] = "light";
  }
  write_manifest(recs, dir / "m.jsonl");
  const auto back = read_manifest(dir / "m.jsonl");
  chk.require(back == recs, "manifest round trip lost information");
  chk.note("pfm/png=20 manifest_records=" + std::to_string(back.size()));
  return chk.outcome();
}

Outcome service_determinism() {
  Check chk;
  std::mt19937_64 rng(20);
  testing::TempDir dir;
  LightPair pair = lamp_scene(120, 80);
  pair.pair_id = "room";
  write_light_pair(pair, dir / "room");
  ServiceConfig cfg;
  cfg.data_root = dir.path();
  cfg.port = 0;
  RelightService service(cfg);
  HttpServer server(service);
  const int port = server.bind();
  std::thread thread([&] { server.run(); });
  server.wait_until_ready();
  httplib::Client cli("127.0.0.1", port);

  const std::string body = R"({"pair_id":"room","alpha":0.8,"gamma":0.55,"color":[1,0.7,0.35]})";
  const auto r1 = cli.Post("/relight", body, "application/json");
  const auto r2 = cli.Post("/relight", body, "application/json");
  chk.require(r1 && r2 && r1->status == 200 && r2->status == 200, "relight request failed");
  if (r1 && r2) chk.require(r1->body == r2->body, "identical requests gave different bytes");

  const auto ep = cli.Post("/relight", R"({"pair_id":"room","alpha":1,"gamma":0})", "application/json");
  const LightPair stored = read_light_pair(dir / "room").pair;
  const LightPair preview = resize_pair(stored, kPreviewLongEdge);
  const ToneMapSpec spec;
  const auto scales = compute_exposures(relight(preview, deciding_params(spec, kNeutral)), spec);
  const std::string want = encode_png(exposure_fusion(preview.ambient, scales, spec.fusion));
  chk.require(ep && ep->status == 200 && ep->body == want, "endpoint request is not the tone-mapped ambient");

  server.stop();
  thread.join();
  chk.note("port=" + std::to_string(port) + " png_bytes=" + std::to_string(r1 ? r1->body.size() : 0));
  return chk.outcome();
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"relight-endpoints", relight_endpoints},
      {"linearity-monotonicity", linearity_monotonicity},
      {"calibration", calibration},
      {"disentanglement", disentanglement},
      {"inflation-counts", inflation_counts},
      {"tonemap-behavior", tonemap_behavior},
      {"outlier-bound", outlier_bound},
      {"metrics-oracle", metrics_oracle},
      {"conditioning", conditioning},
      {"io-round-trips", io_round_trips},
      {"service-determinism", service_determinism},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s %-24s %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
