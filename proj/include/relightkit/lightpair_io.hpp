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

// On-disk pair layout: <dir>/amb.pfm, <dir>/change.pfm, <dir>/pair.meta.

#include <filesystem>
#include <map>
#include <string>

#include "relightkit/keyvalue.hpp"
#include "relightkit/pfm.hpp"
#include "relightkit/relight.hpp"

namespace relightkit {

struct StoredPair {
  LightPair pair;
  // Provenance keys from pair.meta beyond the core fields (e.g. the
  // calibration metadata the pair was derived from).
  std::map<std::string, std::string> extra;
};

inline bool is_pair_directory(const std::filesystem::path& dir) {
  return std::filesystem::is_regular_file(dir / "amb.pfm") &&
         std::filesystem::is_regular_file(dir / "change.pfm") &&
         std::filesystem::is_regular_file(dir / "pair.meta");
}

inline StoredPair read_light_pair(const std::filesystem::path& dir) {
  const KeyValues kv = KeyValues::read(dir / "pair.meta");
  StoredPair stored;
  LightPair& pair = stored.pair;
  pair.pair_id = kv.get("pair_id");
  pair.domain = parse_domain(kv.get("domain"));
  pair.source_color = kv.get_vec3("c_o");
  pair.ambient = read_pfm(dir / "amb.pfm");
  pair.change = read_pfm(dir / "change.pfm");
  validate(pair);
  for (const auto& [k, v] : kv.entries()) {
    if (k != "pair_id" && k != "domain" && k != "c_o") stored.extra[k] = v;
  }
  return stored;
}

inline void write_light_pair(const LightPair& pair, const std::filesystem::path& dir,
                             const std::map<std::string, std::string>& extra = {}) {
  validate(pair);
  std::filesystem::create_directories(dir);
  write_pfm(pair.ambient, dir / "amb.pfm");
  write_pfm(pair.change, dir / "change.pfm");
  KeyValues kv;
  for (const auto& [k, v] : extra) kv.set(k, v);
  kv.set("pair_id", pair.pair_id);
  kv.set("domain", domain_name(pair.domain));
  kv.set("c_o", format_vec(pair.source_color));
  kv.write(dir / "pair.meta");
}

}  // namespace relightkit
