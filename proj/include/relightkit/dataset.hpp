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

// Dataset inflation: every pair is relit over a Cartesian grid of ambient
// intensities, light intensities and light colors, and tone mapped with one
// or both strategies.

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "relightkit/blackbody.hpp"
#include "relightkit/png.hpp"
#include "relightkit/relight.hpp"
#include "relightkit/tonemap.hpp"

namespace relightkit {

struct GridSpec {
  std::string name;
  std::vector<double> alphas;
  std::vector<double> gammas;
  std::vector<Vec3> colors;
  std::vector<std::string> color_names;  // optional, parallel to colors
  std::optional<std::size_t> declared_factor;

  std::size_t size() const { return alphas.size() * gammas.size() * colors.size(); }

  std::string color_name(std::size_t i) const {
    return i < color_names.size() ? color_names[i] : "c" + std::to_string(i);
  }

  RelightParams at(std::size_t ia, std::size_t ig, std::size_t ic) const {
    return {alphas.at(ia), gammas.at(ig), colors.at(ic)};
  }
};

struct GridPoint {
  std::size_t alpha_index = 0;
  std::size_t gamma_index = 0;
  std::size_t color_index = 0;
  friend auto operator<=>(const GridPoint&, const GridPoint&) = default;
};

// Alpha-major enumeration of the grid.
inline std::vector<GridPoint> grid_points(const GridSpec& g) {
  std::vector<GridPoint> out;
  out.reserve(g.size());
  for (std::size_t a = 0; a < g.alphas.size(); ++a) {
    for (std::size_t i = 0; i < g.gammas.size(); ++i) {
      for (std::size_t c = 0; c < g.colors.size(); ++c) out.push_back({a, i, c});
    }
  }
  return out;
}

inline void validate(const GridSpec& g) {
  if (g.alphas.empty() || g.gammas.empty() || g.colors.empty()) {
    throw Error::invalid_field("grid", "every axis needs at least one value");
  }
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  for (double a : g.alphas) {
    if (!in_unit(a)) throw Error::invalid_field("grid.alphas", "values must lie in [0, 1]");
  }
  for (double v : g.gammas) {
    if (!in_unit(v)) throw Error::invalid_field("grid.gammas", "values must lie in [0, 1]");
  }
  auto distinct = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return std::adjacent_find(v.begin(), v.end()) == v.end();
  };
  if (!distinct(g.alphas) || !distinct(g.gammas)) {
    throw Error::invalid_field("grid", "axis values must be distinct");
  }
  for (const auto& c : g.colors) validate(RelightParams{1.0, 1.0, c});
  if (g.declared_factor && *g.declared_factor != g.size()) {
    throw Error::invalid_field("grid", "axis product " + std::to_string(g.size()) +
                                           " differs from declared inflation factor " +
                                           std::to_string(*g.declared_factor));
  }
}

inline constexpr std::size_t kRealInflationFactor = 60;
inline constexpr std::size_t kSyntheticInflationFactor = 36;

inline GridSpec grid_from_palette(std::string name, std::vector<double> alphas, std::vector<double> gammas,
                                  const std::vector<double>& kelvins, std::size_t factor) {
  GridSpec g;
  g.name = std::move(name);
  g.alphas = std::move(alphas);
  g.gammas = std::move(gammas);
  for (const auto& entry : blackbody_palette(kelvins)) {
    g.colors.push_back(entry.rgb);
    g.color_names.push_back(entry.name);
  }
  g.declared_factor = factor;
  validate(g);
  return g;
}

// 3 ambient levels x 4 light levels x 5 colors (neutral + 4 blackbody).
inline GridSpec real_default_grid() {
  return grid_from_palette("real-default", {1.0, 0.5, 0.14}, {0.0, 0.3, 0.7, 1.0},
                           {2500.0, 3500.0, 5000.0, 6500.0}, kRealInflationFactor);
}

// 3 ambient levels x 4 light levels x 3 colors (neutral + 2 blackbody).
inline GridSpec synthetic_default_grid() {
  return grid_from_palette("synth-default", {1.0, 0.5, 0.14}, {0.0, 0.3, 0.7, 1.0}, {2500.0, 6500.0},
                           kSyntheticInflationFactor);
}

inline nlohmann::json grid_to_json(const GridSpec& g) {
  nlohmann::json j;
  j["name"] = g.name;
  j["alphas"] = g.alphas;
  j["gammas"] = g.gammas;
  j["colors"] = g.colors;
  j["color_names"] = g.color_names;
  if (g.declared_factor) j["factor"] = *g.declared_factor;
  return j;
}

// Colors may be given as RGB triples ("colors") or blackbody temperatures
// ("kelvins"); a neutral entry is not added implicitly in either case.
inline GridSpec grid_from_json(const nlohmann::json& j) {
  GridSpec g;
  try {
    g.name = j.value("name", std::string("custom"));
    g.alphas = j.at("alphas").get<std::vector<double>>();
    g.gammas = j.at("gammas").get<std::vector<double>>();
    if (j.contains("colors")) {
      g.colors = j.at("colors").get<std::vector<Vec3>>();
      if (j.contains("color_names")) {
        g.color_names = j.at("color_names").get<std::vector<std::string>>();
      } else {
        for (std::size_t i = 0; i < g.colors.size(); ++i) g.color_names.push_back("c" + std::to_string(i));
      }
    }
    if (j.contains("kelvins")) {
      for (double k : j.at("kelvins").get<std::vector<double>>()) {
        g.colors.push_back(blackbody_rgb(k));
        g.color_names.push_back(std::to_string(static_cast<int>(k)) + "K");
      }
    }
    if (j.contains("factor")) g.declared_factor = j.at("factor").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("grid: ") + e.what());
  }
  validate(g);
  return g;
}

inline GridSpec load_grid(const std::string& name_or_path) {
  if (name_or_path == "real-default") return real_default_grid();
  if (name_or_path == "synth-default") return synthetic_default_grid();
  std::ifstream in(name_or_path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open grid file '" + name_or_path + "'");
  try {
    return grid_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kFormat, name_or_path + ": " + e.what());
  }
}

struct InflatedFrame {
  GridPoint point;
  RelightParams params;
  ToneMapMode mode = ToneMapMode::kTogether;
  SdrImage image;
};

struct Inflation {
  std::vector<InflatedFrame> frames;
  std::vector<ToneMappedSequence> sequences;  // frames cleared; kept for scales
};

// Relights and tone maps the full grid once per requested mode.
inline Inflation inflate(const LightPair& pair, const GridSpec& grid, const ToneMapSpec& spec,
                         const std::vector<ToneMapMode>& modes) {
  validate(grid);
  const auto points = grid_points(grid);
  std::vector<RelightParams> params;
  params.reserve(points.size());
  for (const auto& p : points) params.push_back(grid.at(p.alpha_index, p.gamma_index, p.color_index));

  Inflation out;
  for (ToneMapMode mode : modes) {
    ToneMapSpec s = spec;
    s.mode = mode;
    ToneMappedSequence seq = tonemap(pair, params, s);
    for (std::size_t i = 0; i < points.size(); ++i) {
      out.frames.push_back({points[i], params[i], mode, std::move(seq.frames[i])});
    }
    seq.frames.clear();
    out.sequences.push_back(std::move(seq));
  }
  return out;
}

inline std::string frame_relpath(ToneMapMode mode, const GridPoint& p) {
  return tonemap_mode_name(mode) + "/a" + std::to_string(p.alpha_index) + "_g" +
         std::to_string(p.gamma_index) + "_c" + std::to_string(p.color_index) + ".png";
}

inline nlohmann::json params_to_json(const RelightParams& p) {
  return {{"alpha", p.alpha}, {"gamma", p.gamma}, {"color", p.color}};
}

inline RelightParams params_from_json(const nlohmann::json& j) {
  return {j.at("alpha").get<double>(), j.at("gamma").get<double>(), j.at("color").get<Vec3>()};
}

inline nlohmann::json frame_row(const LightPair& pair, const GridSpec& grid, const InflatedFrame& f) {
  return {{"pair_id", pair.pair_id},
          {"domain", domain_name(pair.domain)},
          {"mode", tonemap_mode_name(f.mode)},
          {"grid_index", {f.point.alpha_index, f.point.gamma_index, f.point.color_index}},
          {"params", params_to_json(f.params)},
          {"color_name", grid.color_name(f.point.color_index)},
          {"extrapolated", f.params.extrapolated()},
          {"path", frame_relpath(f.mode, f.point)}};
}

inline nlohmann::json sequence_row(const LightPair& pair, const ToneMappedSequence& s) {
  nlohmann::json row = {{"pair_id", pair.pair_id}, {"mode", tonemap_mode_name(s.mode)}, {"scales", s.scales}};
  if (s.mode == ToneMapMode::kTogether) row["deciding"] = params_to_json(s.deciding);
  return row;
}

// Writes frames as PNG plus grid.json, frames.jsonl (one row per frame) and
// sequences.jsonl (mode, deciding intensities and scales per sequence).
inline void write_inflation(const LightPair& pair, const GridSpec& grid, const Inflation& inf,
                            const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  {
    std::ofstream g(out_dir / "grid.json", std::ios::trunc);
    g << grid_to_json(grid).dump(2) << "\n";
  }
  std::ofstream frames(out_dir / "frames.jsonl", std::ios::trunc);
  for (const auto& f : inf.frames) {
    const std::string rel = frame_relpath(f.mode, f.point);
    fs::create_directories((out_dir / rel).parent_path());
    write_png(f.image, out_dir / rel);
    frames << frame_row(pair, grid, f).dump() << "\n";
  }
  std::ofstream seqs(out_dir / "sequences.jsonl", std::ios::trunc);
  for (const auto& s : inf.sequences) {
    seqs << sequence_row(pair, s).dump() << "\n";
  }
  if (!frames || !seqs) throw Error(ErrorCode::kIo, "failed writing manifests in " + out_dir.string());
}

// Frame lookup over an inflation directory.
struct InflationIndex {
  std::string pair_id;
  Domain domain = Domain::kReal;
  GridSpec grid;
  std::map<std::tuple<ToneMapMode, std::size_t, std::size_t, std::size_t>, std::string> frames;
  std::filesystem::path root;

  bool has(ToneMapMode mode, const GridPoint& p) const {
    return frames.count({mode, p.alpha_index, p.gamma_index, p.color_index}) != 0;
  }

  const std::string& path(ToneMapMode mode, const GridPoint& p) const {
    auto it = frames.find({mode, p.alpha_index, p.gamma_index, p.color_index});
    if (it == frames.end()) {
      throw Error(ErrorCode::kSampler, "inflation of '" + pair_id + "' has no " + tonemap_mode_name(mode) +
                                           " frame at grid index (" + std::to_string(p.alpha_index) + "," +
                                           std::to_string(p.gamma_index) + "," +
                                           std::to_string(p.color_index) + ")");
    }
    return it->second;
  }

  std::vector<ToneMapMode> modes() const {
    std::vector<ToneMapMode> out;
    for (auto m : {ToneMapMode::kTogether, ToneMapMode::kSeparate}) {
      for (const auto& [key, _] : frames) {
        if (std::get<0>(key) == m) {
          out.push_back(m);
          break;
        }
      }
    }
    return out;
  }
};

// Index over the grid alone, with frame paths named by frame_relpath.
inline InflationIndex index_for_grid(std::string pair_id, Domain domain, const GridSpec& grid,
                                     const std::vector<ToneMapMode>& modes) {
  InflationIndex idx;
  idx.pair_id = std::move(pair_id);
  idx.domain = domain;
  idx.grid = grid;
  for (auto m : modes) {
    for (const auto& p : grid_points(grid)) {
      idx.frames[{m, p.alpha_index, p.gamma_index, p.color_index}] = frame_relpath(m, p);
    }
  }
  return idx;
}

inline InflationIndex read_inflation_index(const std::filesystem::path& dir) {
  InflationIndex idx;
  idx.root = dir;
  std::ifstream g(dir / "grid.json");
  if (!g) throw Error(ErrorCode::kIo, "missing grid.json in " + dir.string());
  try {
    idx.grid = grid_from_json(nlohmann::json::parse(g));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kFormat, (dir / "grid.json").string() + ": " + e.what());
  }
  std::ifstream in(dir / "frames.jsonl");
  if (!in) throw Error(ErrorCode::kIo, "missing frames.jsonl in " + dir.string());
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto row = nlohmann::json::parse(line);
      idx.pair_id = row.at("pair_id").get<std::string>();
      idx.domain = parse_domain(row.at("domain").get<std::string>());
      const auto gi = row.at("grid_index").get<std::vector<std::size_t>>();
      if (gi.size() != 3) throw Error(ErrorCode::kFormat, "grid_index needs 3 entries");
      idx.frames[{parse_tonemap_mode(row.at("mode").get<std::string>()), gi[0], gi[1], gi[2]}] =
          row.at("path").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kFormat,
                  (dir / "frames.jsonl").string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return idx;
}

}  // namespace relightkit
