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

// Local HTTP render service over a directory of light pairs.
//
//   GET  /pairs             {"pairs": [{pair_id, domain, thumbnail}]}
//   GET  /pairs/{id}/meta   c_o, dimensions, masks, color palette
//   GET  /pairs/{id}/thumb  PNG
//   POST /relight           one tone-mapped frame as PNG
//   POST /sequence          tar of a tone-mapped grid with its manifests
//
// Pairs are loaded once at startup and never mutated, so responses depend
// only on the request body. Failures are returned as
// {"error": {"code", "field", "message"}}.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <map>
#include <memory>
#include <semaphore>
#include <string>
#include <vector>

#include "httplib.h"
#include "json.hpp"
#include "relightkit/archive.hpp"
#include "relightkit/blackbody.hpp"
#include "relightkit/dataset.hpp"
#include "relightkit/lightpair_io.hpp"
#include "relightkit/resize.hpp"

namespace relightkit {

inline constexpr int kPreviewLongEdge = 1024;
inline constexpr int kThumbnailLongEdge = 256;
inline constexpr int kMaxRenderSlots = 256;

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::filesystem::path data_root;
  int max_concurrent_renders = 2;
  ToneMapSpec tonemap;
  int preview_long_edge = kPreviewLongEdge;
};

inline void validate(const ServiceConfig& c) {
  if (c.port < 0 || c.port > 65535) throw Error::invalid_field("port", "must lie in [0, 65535]");
  if (c.max_concurrent_renders < 1 || c.max_concurrent_renders > kMaxRenderSlots) {
    throw Error::invalid_field("max_concurrent_renders", "must lie in [1, 256]");
  }
  if (c.preview_long_edge < 1) throw Error::invalid_field("preview_long_edge", "must be >= 1");
  if (!std::filesystem::is_directory(c.data_root)) {
    throw Error(ErrorCode::kIo, "data root '" + c.data_root.string() + "' is not a directory");
  }
  validate(c.tonemap);
}

inline LightPair resize_pair(const LightPair& pair, int long_edge) {
  const auto [w, h] = fit_long_edge(pair.ambient.width(), pair.ambient.height(), long_edge);
  LightPair out = pair;
  out.ambient = resize_bilinear(pair.ambient, w, h);
  out.change = resize_bilinear(pair.change, w, h);
  return out;
}

struct LoadedPair {
  StoredPair stored;
  LightPair preview;
  std::vector<std::string> masks;  // file stems under masks/
  std::string thumbnail_png;
};

// Scans the data root: either a pair directory itself or a directory whose
// children are pair directories.
inline std::map<std::string, std::shared_ptr<const LoadedPair>> load_pairs(const ServiceConfig& cfg) {
  namespace fs = std::filesystem;
  std::vector<fs::path> dirs;
  if (is_pair_directory(cfg.data_root)) {
    dirs.push_back(cfg.data_root);
  } else {
    for (const auto& e : fs::directory_iterator(cfg.data_root)) {
      if (e.is_directory() && is_pair_directory(e.path())) dirs.push_back(e.path());
    }
  }
  std::sort(dirs.begin(), dirs.end());
  if (dirs.empty()) {
    throw Error(ErrorCode::kIo, "data root '" + cfg.data_root.string() + "' contains no light pairs");
  }
  std::map<std::string, std::shared_ptr<const LoadedPair>> pairs;
  for (const auto& dir : dirs) {
    auto lp = std::make_shared<LoadedPair>();
    try {
      lp->stored = read_light_pair(dir);
    } catch (const Error& e) {
      throw e.with_context(dir.string());
    }
    lp->preview = resize_pair(lp->stored.pair, cfg.preview_long_edge);
    if (fs::is_directory(dir / "masks")) {
      for (const auto& m : fs::directory_iterator(dir / "masks")) {
        if (m.path().extension() == ".png") lp->masks.push_back(m.path().stem().string());
      }
      std::sort(lp->masks.begin(), lp->masks.end());
    }
    ToneMapSpec spec = cfg.tonemap;
    spec.mode = ToneMapMode::kTogether;
    const LightPair thumb = resize_pair(lp->stored.pair, kThumbnailLongEdge);
    lp->thumbnail_png = encode_png(tonemap(thumb, {RelightParams{}}, spec).frames.front());
    const std::string id = lp->stored.pair.pair_id;
    if (!pairs.emplace(id, std::move(lp)).second) {
      throw Error(ErrorCode::kInvalidInput, "duplicate pair_id '" + id + "' under data root");
    }
  }
  return pairs;
}

struct ServiceResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

inline int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound:
      return 404;
    case ErrorCode::kInvalidInput:
    case ErrorCode::kFormat:
      return 400;
    case ErrorCode::kDegenerateExposure:
    case ErrorCode::kDegenerateColor:
    case ErrorCode::kNoLight:
    case ErrorCode::kUndefinedRatio:
    case ErrorCode::kSampler:
      return 422;
    default:
      return 500;
  }
}

inline ServiceResponse error_response(const Error& e) {
  nlohmann::json err = {{"code", std::string(error_code_name(e.code()))}, {"message", e.what()}};
  err["field"] = e.field().empty() ? nlohmann::json(nullptr) : nlohmann::json(e.field());
  return {http_status(e.code()), "application/json", nlohmann::json{{"error", err}}.dump()};
}

// Request handling, independent of the socket layer.
class RelightService {
 public:
  explicit RelightService(ServiceConfig cfg)
      : cfg_(std::move(cfg)), slots_((validate(cfg_), cfg_.max_concurrent_renders)), pairs_(load_pairs(cfg_)) {}

  const ServiceConfig& config() const { return cfg_; }

  ServiceResponse list_pairs() const {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& [id, p] : pairs_) {
      list.push_back({{"pair_id", id},
                      {"domain", domain_name(p->stored.pair.domain)},
                      {"thumbnail", "/pairs/" + id + "/thumb"}});
    }
    return {200, "application/json", nlohmann::json{{"pairs", list}}.dump()};
  }

  ServiceResponse pair_meta(const std::string& id) const {
    return guarded([&] {
      const auto& p = find(id);
      nlohmann::json palette = nlohmann::json::array();
      for (const auto& e : blackbody_palette({2500, 3500, 5000, 6500})) {
        palette.push_back({{"name", e.name}, {"kelvin", e.kelvin}, {"rgb", e.rgb}});
      }
      const nlohmann::json j = {{"pair_id", id},
                                {"domain", domain_name(p.stored.pair.domain)},
                                {"c_o", p.stored.pair.source_color},
                                {"width", p.stored.pair.ambient.width()},
                                {"height", p.stored.pair.ambient.height()},
                                {"preview_width", p.preview.ambient.width()},
                                {"preview_height", p.preview.ambient.height()},
                                {"masks", p.masks},
                                {"palette", palette}};
      return ServiceResponse{200, "application/json", j.dump()};
    });
  }

  ServiceResponse thumbnail(const std::string& id) const {
    return guarded([&] { return ServiceResponse{200, "image/png", find(id).thumbnail_png}; });
  }

  // {pair_id, alpha, gamma, color?, tonemap_mode?, deciding?: {alpha, gamma},
  //  full_resolution?}
  ServiceResponse relight_request(const std::string& body) {
    return guarded([&] {
      const auto j = parse_body(body);
      const auto& p = find(field<std::string>(j, "pair_id"));
      RelightParams params;
      params.alpha = field<double>(j, "alpha");
      params.gamma = field<double>(j, "gamma");
      if (j.contains("color")) params.color = field<Vec3>(j, "color");
      validate(params);
      const ToneMapSpec spec = request_spec(j);
      const LightPair& pair = j.value("full_resolution", false) ? p.stored.pair : p.preview;
      RenderSlot slot(slots_);
      const auto seq = tonemap(pair, {params}, spec);
      return ServiceResponse{200, "image/png", encode_png(seq.frames.front())};
    });
  }

  // {pair_id, grid: GridSpec | "real-default" | "synth-default",
  //  tonemap_mode?: together | separate | both, full_resolution?}
  ServiceResponse sequence_request(const std::string& body) {
    return guarded([&] {
      const auto j = parse_body(body);
      const auto& p = find(field<std::string>(j, "pair_id"));
      if (!j.contains("grid")) throw Error::invalid_field("grid", "missing required field");
      const auto& g = j.at("grid");
      GridSpec grid;
      if (g.is_string()) {
        const auto name = g.get<std::string>();
        if (name != "real-default" && name != "synth-default") {
          throw Error::invalid_field("grid", "unknown grid name '" + name + "'");
        }
        grid = load_grid(name);
      } else {
        try {
          grid = grid_from_json(g);
        } catch (const Error& e) {
          throw Error::invalid_field("grid", e.what());
        }
      }
      std::vector<ToneMapMode> modes;
      const std::string mode = j.value("tonemap_mode", std::string("together"));
      if (mode == "both") {
        modes = {ToneMapMode::kTogether, ToneMapMode::kSeparate};
      } else {
        modes = {parse_tonemap_mode(mode)};
      }
      ToneMapSpec spec = request_spec(j, false);
      const LightPair& pair = j.value("full_resolution", false) ? p.stored.pair : p.preview;
      Inflation inf;
      {
        RenderSlot slot(slots_);
        inf = inflate(pair, grid, spec, modes);
      }
      TarWriter tar;
      tar.add("grid.json", grid_to_json(grid).dump(2) + "\n");
      std::string frames;
      for (const auto& f : inf.frames) frames += frame_row(pair, grid, f).dump() + "\n";
      tar.add("frames.jsonl", frames);
      std::string seqs;
      for (const auto& s : inf.sequences) seqs += sequence_row(pair, s).dump() + "\n";
      tar.add("sequences.jsonl", seqs);
      for (const auto& f : inf.frames) tar.add(frame_relpath(f.mode, f.point), encode_png(f.image));
      return ServiceResponse{200, "application/x-tar", tar.finish()};
    });
  }

 private:
  using Semaphore = std::counting_semaphore<kMaxRenderSlots>;

  class RenderSlot {
   public:
    explicit RenderSlot(Semaphore& s) : s_(s) { s_.acquire(); }
    ~RenderSlot() { s_.release(); }
    RenderSlot(const RenderSlot&) = delete;
    RenderSlot& operator=(const RenderSlot&) = delete;

   private:
    Semaphore& s_;
  };

  template <typename Fn>
  static ServiceResponse guarded(Fn&& fn) {
    try {
      return fn();
    } catch (const Error& e) {
      return error_response(e);
    } catch (const std::exception& e) {
      return error_response(Error(ErrorCode::kIo, e.what()));
    }
  }

  static nlohmann::json parse_body(const std::string& body) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::kFormat, std::string("request body: ") + e.what());
    }
    if (!j.is_object()) throw Error(ErrorCode::kFormat, "request body must be a JSON object");
    return j;
  }

  template <typename T>
  static T field(const nlohmann::json& j, const std::string& key) {
    if (!j.contains(key)) throw Error::invalid_field(key, "missing required field");
    try {
      return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw Error::invalid_field(key, "has the wrong type");
    }
  }

  ToneMapSpec request_spec(const nlohmann::json& j, bool read_mode = true) const {
    ToneMapSpec spec = cfg_.tonemap;
    if (read_mode && j.contains("tonemap_mode")) spec.mode = parse_tonemap_mode(field<std::string>(j, "tonemap_mode"));
    if (j.contains("deciding")) {
      const auto& d = j.at("deciding");
      if (!d.is_object()) throw Error::invalid_field("deciding", "must be an object");
      spec.deciding_alpha = field<double>(d, "alpha");
      spec.deciding_gamma = field<double>(d, "gamma");
      if (!(spec.deciding_alpha >= 0.0) || !(spec.deciding_gamma >= 0.0) || !std::isfinite(spec.deciding_alpha) ||
          !std::isfinite(spec.deciding_gamma)) {
        throw Error::invalid_field("deciding", "intensities must be finite and >= 0");
      }
    }
    validate(spec);
    return spec;
  }

  const LoadedPair& find(const std::string& id) const {
    auto it = pairs_.find(id);
    if (it == pairs_.end()) throw Error(ErrorCode::kNotFound, "unknown pair '" + id + "'");
    return *it->second;
  }

  ServiceConfig cfg_;
  Semaphore slots_;
  const std::map<std::string, std::shared_ptr<const LoadedPair>> pairs_;
};

// Socket front end.
class HttpServer {
 public:
  explicit HttpServer(RelightService& service) : service_(service) {
    auto send = [](httplib::Response& res, const ServiceResponse& r) {
      res.status = r.status;
      res.set_content(r.body, r.content_type);
    };
    server_.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    server_.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
    server_.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
      res.status = 204;
    });
    server_.Get("/pairs", [this, send](const httplib::Request&, httplib::Response& res) {
      send(res, service_.list_pairs());
    });
    server_.Get(R"(/pairs/([^/]+)/meta)", [this, send](const httplib::Request& req, httplib::Response& res) {
      send(res, service_.pair_meta(req.matches[1]));
    });
    server_.Get(R"(/pairs/([^/]+)/thumb)", [this, send](const httplib::Request& req, httplib::Response& res) {
      send(res, service_.thumbnail(req.matches[1]));
    });
    server_.Post("/relight", [this, send](const httplib::Request& req, httplib::Response& res) {
      send(res, service_.relight_request(req.body));
    });
    server_.Post("/sequence", [this, send](const httplib::Request& req, httplib::Response& res) {
      send(res, service_.sequence_request(req.body));
    });
  }

  // Binds the listening socket; returns the bound port.
  int bind() {
    const auto& cfg = service_.config();
    int port = cfg.port;
    bool ok;
    if (port == 0) {
      port = server_.bind_to_any_port(cfg.host);
      ok = port > 0;
    } else {
      ok = server_.bind_to_port(cfg.host, port);
    }
    if (!ok) {
      throw Error(ErrorCode::kIo, "cannot listen on " + cfg.host + ":" + std::to_string(cfg.port) +
                                      " (address in use or not available)");
    }
    port_ = port;
    return port;
  }

  int port() const { return port_; }

  // Blocks until stop().
  void run() { server_.listen_after_bind(); }
  void stop() { server_.stop(); }
  void wait_until_ready() const { server_.wait_until_ready(); }

 private:
  RelightService& service_;
  httplib::Server server_;
  int port_ = 0;
};

// "host:port" or ":port" or "port".
inline std::pair<std::string, int> parse_listen(const std::string& addr) {
  std::string host = "127.0.0.1";
  std::string port = addr;
  if (const auto colon = addr.rfind(':'); colon != std::string::npos) {
    if (colon > 0) host = addr.substr(0, colon);
    port = addr.substr(colon + 1);
  }
  int p = -1;
  const auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), p);
  if (ec != std::errc() || ptr != port.data() + port.size() || p < 0 || p > 65535) {
    throw Error::invalid_field("listen", "expected host:port, got '" + addr + "'");
  }
  return {host, p};
}

}  // namespace relightkit
