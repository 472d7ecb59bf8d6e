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

// `key=value` text files: one entry per line, '#' starts a comment line,
// surrounding whitespace is ignored.

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "relightkit/error.hpp"
#include "relightkit/image.hpp"

namespace relightkit {

class KeyValues {
 public:
  static KeyValues parse(const std::string& text, const std::string& origin) {
    KeyValues kv;
    kv.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const std::string t = trim(line);
      if (t.empty() || t[0] == '#') continue;
      const auto eq = t.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw Error(ErrorCode::kFormat, origin + ":" + std::to_string(line_no) +
                                            ": expected key=value");
      }
      kv.entries_[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
    }
    return kv;
  }

  static KeyValues read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.string());
  }

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  const std::string& get(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) {
      throw Error::format_field(key, origin_ + ": missing key '" + key + "'");
    }
    return it->second;
  }

  std::string get_or(const std::string& key, const std::string& fallback) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second;
  }

  double get_double(const std::string& key) const {
    return to_double(get(key), key);
  }

  std::vector<double> get_doubles(const std::string& key) const {
    std::vector<double> out;
    std::string item;
    std::istringstream in(get(key));
    while (std::getline(in, item, ',')) out.push_back(to_double(trim(item), key));
    return out;
  }

  Vec3 get_vec3(const std::string& key) const {
    const auto v = get_doubles(key);
    if (v.size() != 3) {
      throw Error(ErrorCode::kFormat,
                  origin_ + ": key '" + key + "' needs 3 comma-separated values");
    }
    return {v[0], v[1], v[2]};
  }

  const std::map<std::string, std::string>& entries() const { return entries_; }

  void set(const std::string& key, const std::string& value) {
    entries_[key] = value;
  }

  std::string serialize() const {
    std::string out;
    for (const auto& [k, v] : entries_) out += k + "=" + v + "\n";
    return out;
  }

  void write(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
    out << serialize();
  }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }

  double to_double(const std::string& text, const std::string& key) const {
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
      throw Error(ErrorCode::kFormat,
                  origin_ + ": key '" + key + "' has non-numeric value '" + text + "'");
    }
    return v;
  }

  std::string origin_;
  std::map<std::string, std::string> entries_;
};

// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

inline std::string format_vec(std::span<const double> v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += format_double(v[i]);
  }
  return out;
}

}  // namespace relightkit
