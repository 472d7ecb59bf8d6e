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

// relightd: batch pipeline and local render service.
//
//   calibrate    raw mosaic pair -> calibrated on/off linear images
//   disentangle  on/off images (or per-light renders) -> light pair
//   inflate      light pairs -> tone-mapped grid frames, manifests, samples
//   condition    training manifest -> conditioning packs
//   eval         prediction vs ground-truth manifests -> metric report
//   stats        residual statistics of calibrated captures
//   serve        HTTP service over a directory of light pairs

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "relightkit/relightkit.hpp"

namespace fs = std::filesystem;
using namespace relightkit;

namespace {

std::vector<fs::path> child_dirs_with(const fs::path& root, const std::vector<std::string>& files) {
  auto has_all = [&](const fs::path& d) {
    for (const auto& f : files) {
      if (!fs::is_regular_file(d / f)) return false;
    }
    return true;
  };
  std::vector<fs::path> out;
  if (has_all(root)) {
    out.push_back(root);
    return out;
  }
  if (!fs::is_directory(root)) throw Error(ErrorCode::kIo, "'" + root.string() + "' is not a directory");
  for (const auto& e : fs::directory_iterator(root)) {
    if (e.is_directory() && has_all(e.path())) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) {
    throw Error(ErrorCode::kIo, "no inputs under '" + root.string() + "'");
  }
  return out;
}

std::vector<ToneMapMode> parse_modes(const std::string& s) {
  if (s == "both") return {ToneMapMode::kTogether, ToneMapMode::kSeparate};
  return {parse_tonemap_mode(s)};
}

// calibrate ---------------------------------------------------------------

struct CalibrateArgs {
  std::string on, off, out;
  double gamma_ref = kDefaultGammaRef;
};

int run_calibrate(const CalibrateArgs& a) {
  auto [mosaic_on, meta_on] = read_raw_capture(a.on);
  auto [mosaic_off, meta_off] = read_raw_capture(a.off);
  for (const auto* m : {&meta_on, &meta_off}) {
    const double dev = ccm_row_sum_deviation(m->ccm);
    if (dev > kCcmRowSumTolerance) {
      std::cerr << "warning: CCM rows deviate from unit sum by " << dev << "\n";
    }
  }
  const CalibratedPair cal = calibrate_pair(mosaic_on, meta_on, mosaic_off, meta_off, a.gamma_ref);
  fs::create_directories(a.out);
  write_pfm(cal.on, fs::path(a.out) / "on.pfm");
  write_pfm(cal.off, fs::path(a.out) / "off.pfm");
  write_raw_meta(cal.meta_on, fs::path(a.out) / "on.meta");
  write_raw_meta(cal.meta_off, fs::path(a.out) / "off.meta");
  std::cout << "wrote calibrated capture to " << a.out << "\n";
  return 0;
}

// disentangle -------------------------------------------------------------

struct DisentangleArgs {
  std::string data_root, out, pair_id;
  std::string renders;
  int target = 0;
  std::uint64_t seed = 0;
  bool no_bound = false;
};

std::vector<LinearImage> read_pfm_dir(const fs::path& dir, std::vector<std::string>* ids) {
  std::vector<fs::path> files;
  if (fs::is_directory(dir)) {
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.path().extension() == ".pfm") files.push_back(e.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<LinearImage> out;
  for (const auto& f : files) {
    out.push_back(read_pfm(f));
    ids->push_back(f.stem().string());
  }
  return out;
}

int run_disentangle(const DisentangleArgs& a) {
  LightPair pair;
  std::map<std::string, std::string> extra;
  if (!a.renders.empty()) {
    // Synthetic view: lights/*.pfm and env/*.pfm.
    PerLightRenderSet set;
    set.view_id = fs::path(a.renders).filename().string();
    set.light_renders = read_pfm_dir(fs::path(a.renders) / "lights", &set.light_ids);
    set.env_renders = read_pfm_dir(fs::path(a.renders) / "env", &set.env_ids);
    if (set.light_renders.empty()) throw Error(ErrorCode::kIo, "no renders under " + a.renders + "/lights");
    if (a.target < 0 || static_cast<std::size_t>(a.target) >= set.light_renders.size()) {
      throw Error::invalid_field("target", "out of range");
    }
    std::mt19937_64 rng(a.seed);
    const AmbientMix mix = sample_ambient_mix(set.light_renders.size(), set.env_renders.size(),
                                              static_cast<std::size_t>(a.target), rng);
    std::vector<LinearImage> all = set.light_renders;
    all.insert(all.end(), set.env_renders.begin(), set.env_renders.end());
    const double e_max = a.no_bound ? std::numeric_limits<double>::infinity()
                                    : bound_outliers(all, kOutlierQuantile);
    pair = compose_synthetic(set, static_cast<std::size_t>(a.target), mix, e_max);
    extra["e_max"] = format_double(e_max);
    extra["seed"] = std::to_string(a.seed);
    extra["env_weights"] = format_vec(mix.env_weights);
    extra["light_weights"] = format_vec(mix.light_weights);
  } else {
    if (a.data_root.empty()) throw Error::invalid_field("data-root", "required without --renders");
    const fs::path dir(a.data_root);
    const LinearImage on = read_pfm(dir / "on.pfm");
    const LinearImage off = read_pfm(dir / "off.pfm");
    const Disentangled d = disentangle(on, off);
    pair.ambient = d.ambient;
    pair.change = d.change;
    pair.domain = Domain::kReal;
    pair.pair_id = a.pair_id.empty() ? fs::absolute(dir).lexically_normal().filename().string() : a.pair_id;
    pair.source_color = estimate_source_color(pair.change);
    try {
      const ResidualStats s = residual_stats(on, off);
      extra["relative_error"] = format_double(s.relative_error);
      extra["pct_negative"] = format_double(s.pct_negative);
    } catch (const Error& e) {
      std::cerr << "warning: " << e.what() << "\n";
    }
  }
  if (!a.pair_id.empty()) pair.pair_id = a.pair_id;
  write_light_pair(pair, a.out, extra);
  std::cout << "wrote pair '" << pair.pair_id << "' (c_o = " << format_vec(pair.source_color) << ") to " << a.out
            << "\n";
  return 0;
}

// inflate -----------------------------------------------------------------

struct InflateArgs {
  std::string data_root, grid = "real-default", tonemap = "both", out;
  std::uint64_t seed = 0;
  std::uint64_t samples = 0;
  double p_light = 0.5, p_endpoint = 0.3;
};

int run_inflate(const InflateArgs& a) {
  const GridSpec grid = load_grid(a.grid);
  const auto modes = parse_modes(a.tonemap);
  SamplerConfig sc;
  sc.seed = a.seed;
  sc.p_light = a.p_light;
  sc.p_endpoint = a.p_endpoint;
  validate(sc);
  std::vector<SampleRecord> records;
  for (const auto& dir : child_dirs_with(a.data_root, {"amb.pfm", "change.pfm", "pair.meta"})) {
    const StoredPair stored = read_light_pair(dir);
    const fs::path out = fs::path(a.out) / stored.pair.pair_id;
    const Inflation inf = inflate(stored.pair, grid, ToneMapSpec{}, modes);
    write_inflation(stored.pair, grid, inf, out);
    std::cout << stored.pair.pair_id << ": " << inf.frames.size() << " frames (" << grid.size()
              << " per mode)\n";
    if (a.samples > 0) {
      InflationIndex idx = read_inflation_index(out);
      for (std::uint64_t i = 0; i < a.samples; ++i) {
        const ToneMapMode mode = modes[i % modes.size()];
        SampleRecord r = sample_training_pair(idx, sc, i, mode);
        r.source_path = (fs::path(stored.pair.pair_id) / r.source_path).generic_string();
        r.target_path = (fs::path(stored.pair.pair_id) / r.target_path).generic_string();
        records.push_back(std::move(r));
      }
    }
  }
  if (a.samples > 0) {
    write_manifest(records, fs::path(a.out) / "samples.jsonl");
    std::cout << "wrote " << records.size() << " training records\n";
  }
  return 0;
}

// condition ---------------------------------------------------------------

struct ConditionArgs {
  std::string manifest, mask, depth, out;
  int width = 0, height = 0;
  bool soft_mask = false;
  int num_freqs = kDefaultFourierFrequencies;
};

int run_condition(const ConditionArgs& a) {
  const auto records = read_manifest(a.manifest);
  const fs::path base = fs::path(a.manifest).parent_path();
  std::optional<Plane> mask;
  std::optional<Plane> depth;
  if (!a.mask.empty()) mask = ingest_mask(a.mask, a.soft_mask);
  if (!a.depth.empty()) depth = ingest_depth(a.depth);
  fs::create_directories(a.out);
  std::ofstream globals(fs::path(a.out) / "globals.jsonl", std::ios::trunc);
  for (const auto& r : records) {
    const SdrImage src = read_png(resolve_relative(a.manifest, r.source_path));
    const Plane m = mask ? *mask : [&] {
      Plane ones(src.width(), src.height());
      std::fill(ones.data().begin(), ones.data().end(), 1.0f);
      return ones;
    }();
    const Plane d = depth ? *depth : Plane(src.width(), src.height());
    const int w = a.width > 0 ? a.width : src.width();
    const int h = a.height > 0 ? a.height : src.height();
    const ConditioningPack pack = build_conditioning(r, src, m, d, w, h, a.num_freqs);
    write_conditioning_pack(pack, fs::path(a.out) / r.id);
    nlohmann::json row = globals_to_json(pack);
    row["id"] = r.id;
    row["target_path"] = fs::absolute(base / r.target_path).lexically_normal().string();
    row["drop_conditions"] = r.drop_conditions;
    globals << row.dump() << "\n";
  }
  std::cout << "wrote " << records.size() << " conditioning packs to " << a.out << "\n";
  return 0;
}

// eval --------------------------------------------------------------------

struct EvalArgs {
  std::string pred, gt, out;
};

int run_eval(const EvalArgs& a) {
  const MetricReport rep = evaluate_paired(a.pred, a.gt);
  if (!a.out.empty()) write_report(rep, a.out);
  std::cout << report_text(rep);
  return 0;
}

// stats -------------------------------------------------------------------

struct StatsArgs {
  std::string data_root, out;
  int bins = 20;
};

int run_stats(const StatsArgs& a) {
  if (a.bins < 1) throw Error::invalid_field("bins", "must be >= 1");
  fs::create_directories(a.out);
  std::ofstream rows(fs::path(a.out) / "residuals.csv", std::ios::trunc);
  rows << "capture,relative_error,pct_negative\n";
  std::vector<double> rel, pct;
  for (const auto& dir : child_dirs_with(a.data_root, {"on.pfm", "off.pfm"})) {
    const ResidualStats s = residual_stats(read_pfm(dir / "on.pfm"), read_pfm(dir / "off.pfm"));
    rows << dir.filename().string() << "," << format_double(s.relative_error) << ","
         << format_double(s.pct_negative) << "\n";
    rel.push_back(s.relative_error);
    pct.push_back(s.pct_negative);
  }
  // Relative error over [0, 1] plus one overflow bin; negatives over [0, 100].
  std::ofstream hist(fs::path(a.out) / "histogram.csv", std::ios::trunc);
  hist << "metric,bin_lo,bin_hi,count\n";
  auto emit = [&](const std::string& name, const std::vector<double>& v, double hi, bool overflow) {
    std::vector<std::size_t> counts(a.bins + (overflow ? 1 : 0), 0);
    for (double x : v) {
      auto b = static_cast<std::size_t>(x / hi * a.bins);
      if (x >= hi) b = overflow && x > hi ? a.bins : a.bins - 1;
      ++counts[b];
    }
    for (int b = 0; b < a.bins; ++b) {
      hist << name << "," << format_double(hi * b / a.bins) << "," << format_double(hi * (b + 1) / a.bins)
           << "," << counts[b] << "\n";
    }
    if (overflow) hist << name << "," << format_double(hi) << ",inf," << counts[a.bins] << "\n";
  };
  emit("relative_error", rel, 1.0, true);
  emit("pct_negative", pct, 100.0, false);
  std::cout << "wrote residual statistics for " << rel.size() << " captures to " << a.out << "\n";
  return 0;
}

// serve -------------------------------------------------------------------

struct ServeArgs {
  std::string data_root, listen = "127.0.0.1:8080";
  int max_renders = 2;
  int preview = kPreviewLongEdge;
};

HttpServer* g_server = nullptr;

int run_serve(const ServeArgs& a) {
  ServiceConfig cfg;
  std::tie(cfg.host, cfg.port) = parse_listen(a.listen);
  cfg.data_root = a.data_root;
  cfg.max_concurrent_renders = a.max_renders;
  cfg.preview_long_edge = a.preview;
  RelightService service(cfg);
  HttpServer server(service);
  const int port = server.bind();
  g_server = &server;
  std::signal(SIGINT, [](int) {
    if (g_server) g_server->stop();
  });
  std::signal(SIGTERM, [](int) {
    if (g_server) g_server->stop();
  });
  std::cout << "listening on " << cfg.host << ":" << port << std::endl;
  server.run();
  g_server = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"relightd: light-pair relighting pipeline and render service"};
  app.require_subcommand(1);

  CalibrateArgs cal;
  auto* c = app.add_subcommand("calibrate", "Calibrate a raw on/off mosaic pair");
  c->add_option("--on", cal.on, "Mosaic PFM of the light-on capture (sidecar .meta alongside)")->required();
  c->add_option("--off", cal.off, "Mosaic PFM of the light-off capture")->required();
  c->add_option("--out", cal.out, "Output directory")->required();
  c->add_option("--gamma-ref", cal.gamma_ref, "Light intensity at which white balance is interpolated");

  DisentangleArgs dis;
  auto* d = app.add_subcommand("disentangle", "Build a light pair from a calibrated capture or renders");
  d->add_option("--data-root", dis.data_root, "Calibrated capture directory (on.pfm, off.pfm)");
  d->add_option("--renders", dis.renders, "Synthetic view directory (lights/*.pfm, env/*.pfm)");
  d->add_option("--target", dis.target, "Index of the target light among lights/*.pfm");
  d->add_option("--seed", dis.seed, "Seed for the ambient mix");
  d->add_flag("--no-bound", dis.no_bound, "Skip the outlier bound on synthetic renders");
  d->add_option("--pair-id", dis.pair_id, "Pair identifier");
  d->add_option("--out", dis.out, "Output pair directory")->required();

  InflateArgs inf;
  auto* i = app.add_subcommand("inflate", "Relight and tone map light pairs over a grid");
  i->add_option("--data-root", inf.data_root, "Pair directory or a directory of pairs")->required();
  i->add_option("--grid", inf.grid, "real-default, synth-default or a grid JSON path");
  i->add_option("--tonemap", inf.tonemap, "together, separate or both")
      ->check(CLI::IsMember({"together", "separate", "both"}));
  i->add_option("--samples", inf.samples, "Training records to sample per pair");
  i->add_option("--seed", inf.seed, "Sampler seed");
  i->add_option("--p-light", inf.p_light, "Probability of changing the target light");
  i->add_option("--p-endpoint", inf.p_endpoint, "Probability of snapping to an axis endpoint");
  i->add_option("--out", inf.out, "Output directory")->required();

  ConditionArgs con;
  auto* k = app.add_subcommand("condition", "Build conditioning packs for a training manifest");
  k->add_option("--manifest", con.manifest, "Training manifest (JSON Lines)")->required();
  k->add_option("--mask", con.mask, "Target light mask (8-bit gray PNG); default all ones");
  k->add_flag("--soft-mask", con.soft_mask, "Keep fractional mask values");
  k->add_option("--depth", con.depth, "Depth plane (single-channel PFM); default zeros");
  k->add_option("--width", con.width, "Output width (default: source width)");
  k->add_option("--height", con.height, "Output height (default: source height)");
  k->add_option("--num-freqs", con.num_freqs, "Fourier frequencies per scalar");
  k->add_option("--out", con.out, "Output directory")->required();

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Compare predictions against ground truth");
  e->add_option("--pred", ev.pred, "Prediction manifest")->required();
  e->add_option("--gt", ev.gt, "Ground-truth manifest")->required();
  e->add_option("--out", ev.out, "Report directory");

  StatsArgs st;
  auto* s = app.add_subcommand("stats", "Residual statistics of calibrated captures");
  s->add_option("--data-root", st.data_root, "Capture directory or a directory of captures")->required();
  s->add_option("--bins", st.bins, "Histogram bins");
  s->add_option("--out", st.out, "Output directory")->required();

  ServeArgs sv;
  auto* v = app.add_subcommand("serve", "Serve relighting over HTTP");
  v->add_option("--data-root", sv.data_root, "Directory of light pairs")->required();
  v->add_option("--listen", sv.listen, "host:port to bind (port 0 picks one)");
  v->add_option("--max-renders", sv.max_renders, "Concurrent render limit");
  v->add_option("--preview-edge", sv.preview, "Long edge of interactive renders");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*c) return run_calibrate(cal);
    if (*d) return run_disentangle(dis);
    if (*i) return run_inflate(inf);
    if (*k) return run_condition(con);
    if (*e) return run_eval(ev);
    if (*s) return run_stats(st);
    if (*v) return run_serve(sv);
  } catch (const Error& err) {
    std::cerr << "error [" << error_code_name(err.code()) << "]: " << err.what() << "\n";
    return 1;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 2;
}
