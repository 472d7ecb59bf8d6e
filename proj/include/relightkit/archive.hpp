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

// Minimal POSIX ustar writer and reader. Entries are regular files with
// mode 0644 and mtime 0, so identical contents give identical archives.

#include <cstdio>
#include <cstring>
#include <string>
#include <utility>
#include <vector>

#include "relightkit/error.hpp"

namespace relightkit {

class TarWriter {
 public:
  void add(const std::string& name, const std::string& contents) {
    if (name.empty() || name.size() > 100) {
      throw Error(ErrorCode::kInvalidInput, "tar entry name must be 1..100 bytes: '" + name + "'");
    }
    char header[512];
    std::memset(header, 0, sizeof(header));
    std::memcpy(header, name.data(), name.size());
    octal(header + 100, 8, 0644);
    octal(header + 108, 8, 0);
    octal(header + 116, 8, 0);
    octal(header + 124, 12, contents.size());
    octal(header + 136, 12, 0);
    std::memset(header + 148, ' ', 8);
    header[156] = '0';
    std::memcpy(header + 257, "ustar", 6);
    std::memcpy(header + 263, "00", 2);
    unsigned sum = 0;
    for (unsigned char c : header) sum += c;
    std::snprintf(header + 148, 8, "%06o", sum);
    header[155] = ' ';
    out_.append(header, sizeof(header));
    out_ += contents;
    out_.append((512 - contents.size() % 512) % 512, '\0');
  }

  // Appends the two zero end-of-archive blocks and returns the bytes.
  std::string finish() {
    out_.append(1024, '\0');
    return std::move(out_);
  }

 private:
  static void octal(char* field, std::size_t width, std::size_t value) {
    std::snprintf(field, width, "%0*zo", static_cast<int>(width - 1), value);
  }

  std::string out_;
};

// Reads archives written by TarWriter.
inline std::vector<std::pair<std::string, std::string>> read_tar(const std::string& bytes) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::size_t pos = 0;
  while (pos + 512 <= bytes.size()) {
    const char* h = bytes.data() + pos;
    if (h[0] == '\0') break;
    const std::string name(h, strnlen(h, 100));
    const std::size_t size = std::stoull(std::string(h + 124, strnlen(h + 124, 12)), nullptr, 8);
    pos += 512;
    if (pos + size > bytes.size()) throw Error::format_at(pos, "truncated tar entry '" + name + "'");
    entries.emplace_back(name, bytes.substr(pos, size));
    pos += (size + 511) / 512 * 512;
  }
  return entries;
}

}  // namespace relightkit
