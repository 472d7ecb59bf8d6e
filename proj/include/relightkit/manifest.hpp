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

// Training-record manifests: UTF-8 JSON Lines, one SampleRecord per line.
// Keys this code does not know about are carried through untouched.

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "relightkit/dataset.hpp"
#include "relightkit/relight.hpp"
#include "relightkit/tonemap.hpp"

namespace relightkit {

struct SampleRecord {
  std::string id;
  std::string pair_id;
  RelightParams source;
  RelightParams target;
  double delta_gamma = 0.0;  // target.gamma - source.gamma
  double delta_alpha = 0.0;  // target.alpha - source.alpha
  Vec3 color = kNeutral;     // c_t
  ToneMapMode tonemap_mode = ToneMapMode::kTogether;
  std::string source_path;
  std::string target_path;
  Domain domain = Domain::kReal;
  // Training-time dropout of the depth and color conditions; the planes
  // are still emitted.
  bool drop_conditions = false;
  nlohmann::json extra = nlohmann::json::object();

  bool operator==(const SampleRecord&) const = default;
};

inline void validate(const SampleRecord& r) {
  if (r.delta_gamma != r.target.gamma - r.source.gamma) {
    throw Error::invalid_field("delta_gamma", "does not equal target.gamma - source.gamma");
  }
  if (r.delta_alpha != r.target.alpha - r.source.alpha) {
    throw Error::invalid_field("delta_alpha", "does not equal target.alpha - source.alpha");
  }
  if (r.delta_gamma != 0.0 && r.delta_alpha != 0.0) {
    throw Error(ErrorCode::kInvalidInput, "record '" + r.id + "' changes both light and ambient intensity");
  }
}

inline const std::vector<std::string>& manifest_required_keys() {
  static const std::vector<std::string> keys = {
      "id",          "pair_id",     "source",      "target",      "delta_gamma", "delta_alpha",
      "c_t",         "tonemap_mode", "source_path", "target_path", "domain"};
  return keys;
}

inline nlohmann::json record_to_json(const SampleRecord& r) {
  nlohmann::json j = r.extra;
  j["id"] = r.id;
  j["pair_id"] = r.pair_id;
  j["source"] = params_to_json(r.source);
  j["target"] = params_to_json(r.target);
  j["delta_gamma"] = r.delta_gamma;
  j["delta_alpha"] = r.delta_alpha;
  j["c_t"] = r.color;
  j["tonemap_mode"] = tonemap_mode_name(r.tonemap_mode);
  j["source_path"] = r.source_path;
  j["target_path"] = r.target_path;
  j["domain"] = domain_name(r.domain);
  j["drop_conditions"] = r.drop_conditions;
  return j;
}

inline SampleRecord record_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kFormat, "record is not a JSON object");
  for (const auto& key : manifest_required_keys()) {
    if (!j.contains(key)) throw Error::invalid_field(key, "missing required key");
  }
  SampleRecord r;
  try {
    r.id = j.at("id").get<std::string>();
    r.pair_id = j.at("pair_id").get<std::string>();
    r.source = params_from_json(j.at("source"));
    r.target = params_from_json(j.at("target"));
    r.delta_gamma = j.at("delta_gamma").get<double>();
    r.delta_alpha = j.at("delta_alpha").get<double>();
    r.color = j.at("c_t").get<Vec3>();
    r.tonemap_mode = parse_tonemap_mode(j.at("tonemap_mode").get<std::string>());
    r.source_path = j.at("source_path").get<std::string>();
    r.target_path = j.at("target_path").get<std::string>();
    r.domain = parse_domain(j.at("domain").get<std::string>());
    r.drop_conditions = j.value("drop_conditions", false);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, e.what());
  }
  r.extra = j;
  for (const auto& key : manifest_required_keys()) r.extra.erase(key);
  r.extra.erase("drop_conditions");
  validate(r);
  return r;
}

inline void write_manifest_line(std::ostream& out, const SampleRecord& r) {
  out << record_to_json(r).dump() << "\n";
}

inline void write_manifest(const std::vector<SampleRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  for (const auto& r : records) write_manifest_line(out, r);
  if (!out) throw Error(ErrorCode::kIo, "short write to '" + path.string() + "'");
}

inline std::vector<SampleRecord> parse_manifest(std::istream& in, const std::string& origin) {
  std::vector<SampleRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = origin + ":" + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::kFormat, where + ": " + e.what());
    }
    try {
      records.push_back(record_from_json(j));
    } catch (const Error& e) {
      throw e.with_context(where);
    }
  }
  return records;
}

inline std::vector<SampleRecord> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  return parse_manifest(in, path.string());
}

}  // namespace relightkit
