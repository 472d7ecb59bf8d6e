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

// Portable float map I/O. Files are written little-endian ("-1.0" scale)
// with rows stored bottom-to-top, as the format prescribes.

#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "relightkit/image.hpp"

namespace relightkit {

namespace detail {

inline std::vector<std::uint8_t> read_file_bytes(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file_bytes(const std::filesystem::path& path,
                             const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw Error(ErrorCode::kIo, "short write to '" + path.string() + "'");
  }
}

struct PfmHeader {
  int channels = 0;
  int width = 0;
  int height = 0;
  bool little_endian = true;
  std::size_t data_offset = 0;
};

class PfmHeaderParser {
 public:
  explicit PfmHeaderParser(const std::vector<std::uint8_t>& bytes)
      : bytes_(bytes) {}

  PfmHeader parse() {
    PfmHeader h;
    if (bytes_.size() < 2 || bytes_[0] != 'P' ||
        (bytes_[1] != 'F' && bytes_[1] != 'f')) {
      throw Error::format_at(0, "missing PF/Pf magic");
    }
    h.channels = bytes_[1] == 'F' ? 3 : 1;
    pos_ = 2;
    h.width = static_cast<int>(read_integer("width"));
    h.height = static_cast<int>(read_integer("height"));
    const double scale = read_scale();
    h.little_endian = scale < 0.0;
    // Exactly one whitespace byte separates the header from the raster.
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw Error::format_at(pos_, "expected whitespace after scale");
    }
    h.data_offset = pos_ + 1;
    return h;
  }

 private:
  void skip_space() {
    bool any = false;
    while (pos_ < bytes_.size() && std::isspace(bytes_[pos_])) {
      ++pos_;
      any = true;
    }
    if (!any) throw Error::format_at(pos_, "expected whitespace");
  }

  std::string token() {
    const std::size_t start = pos_;
    while (pos_ < bytes_.size() && !std::isspace(bytes_[pos_])) ++pos_;
    if (start == pos_) throw Error::format_at(start, "unexpected end of header");
    return {bytes_.begin() + static_cast<std::ptrdiff_t>(start),
            bytes_.begin() + static_cast<std::ptrdiff_t>(pos_)};
  }

  long read_integer(const char* what) {
    skip_space();
    const std::size_t start = pos_;
    const std::string t = token();
    char* end = nullptr;
    const long v = std::strtol(t.c_str(), &end, 10);
    if (*end != '\0' || v < 1 || v > (1L << 20)) {
      throw Error::format_at(start, std::string("invalid ") + what + " '" +
                                        t + "'");
    }
    return v;
  }

  double read_scale() {
    skip_space();
    const std::size_t start = pos_;
    const std::string t = token();
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (*end != '\0' || !std::isfinite(v) || v == 0.0) {
      throw Error::format_at(start, "invalid scale '" + t + "'");
    }
    return v;
  }

  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

// Decodes the raster into top-to-bottom row order.
inline std::vector<float> decode_pfm_raster(
    const std::vector<std::uint8_t>& bytes, const PfmHeader& h) {
  const std::size_t row_floats =
      static_cast<std::size_t>(h.width) * static_cast<std::size_t>(h.channels);
  const std::size_t count = row_floats * static_cast<std::size_t>(h.height);
  const std::size_t need = count * sizeof(float);
  if (bytes.size() - h.data_offset < need) {
    throw Error::format_at(
        bytes.size(), "truncated raster: expected " + std::to_string(need) +
                          " bytes, found " +
                          std::to_string(bytes.size() - h.data_offset));
  }
  const bool swap = h.little_endian != (std::endian::native == std::endian::little);
  std::vector<float> out(count);
  for (int file_row = 0; file_row < h.height; ++file_row) {
    const int y = h.height - 1 - file_row;
    for (std::size_t i = 0; i < row_floats; ++i) {
      const std::size_t offset =
          h.data_offset +
          (static_cast<std::size_t>(file_row) * row_floats + i) * sizeof(float);
      std::uint32_t word;
      std::memcpy(&word, bytes.data() + offset, sizeof(word));
      if (swap) word = __builtin_bswap32(word);
      out[static_cast<std::size_t>(y) * row_floats + i] =
          std::bit_cast<float>(word);
    }
  }
  return out;
}

inline std::string encode_pfm(int width, int height, int channels,
                              std::span<const float> data) {
  std::string out = (channels == 3 ? "PF\n" : "Pf\n") + std::to_string(width) +
                    " " + std::to_string(height) + "\n-1.0\n";
  const std::size_t row_floats =
      static_cast<std::size_t>(width) * static_cast<std::size_t>(channels);
  const std::size_t header = out.size();
  out.resize(header + data.size() * sizeof(float));
  char* dst = out.data() + header;
  for (int file_row = 0; file_row < height; ++file_row) {
    const int y = height - 1 - file_row;
    for (std::size_t i = 0; i < row_floats; ++i) {
      std::uint32_t word = std::bit_cast<std::uint32_t>(
          data[static_cast<std::size_t>(y) * row_floats + i]);
      if constexpr (std::endian::native != std::endian::little) {
        word = __builtin_bswap32(word);
      }
      std::memcpy(dst, &word, sizeof(word));
      dst += sizeof(word);
    }
  }
  return out;
}

}  // namespace detail

inline LinearImage decode_pfm(const std::vector<std::uint8_t>& bytes) {
  const auto h = detail::PfmHeaderParser(bytes).parse();
  if (h.channels != 3) {
    throw Error::format_at(0, "grayscale PFM ('Pf') where color ('PF') is required");
  }
  auto raster = detail::decode_pfm_raster(bytes, h);
  for (std::size_t i = 0; i < raster.size(); ++i) {
    if (!std::isfinite(raster[i]) || raster[i] < 0.0f) {
      // Report the offset of the offending sample in file order.
      const std::size_t row_floats = static_cast<std::size_t>(h.width) * 3;
      const std::size_t y = i / row_floats;
      const std::size_t file_index =
          (static_cast<std::size_t>(h.height) - 1 - y) * row_floats +
          i % row_floats;
      throw Error::format_at(h.data_offset + file_index * sizeof(float),
                             "negative or non-finite radiance sample");
    }
  }
  return LinearImage(h.width, h.height, std::move(raster));
}

inline LinearImage read_pfm(const std::filesystem::path& path) {
  try {
    return decode_pfm(detail::read_file_bytes(path));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kFormat) throw;
    throw e.with_context(path.string());
  }
}

inline void write_pfm(const LinearImage& img, const std::filesystem::path& path) {
  detail::write_file_bytes(
      path, detail::encode_pfm(img.width(), img.height(), 3, img.data()));
}

// Single-channel ("Pf") planes. Values need only be finite.
inline Plane decode_pfm_plane(const std::vector<std::uint8_t>& bytes) {
  const auto h = detail::PfmHeaderParser(bytes).parse();
  if (h.channels != 1) {
    throw Error::format_at(0, "color PFM ('PF') where a single-channel plane ('Pf') is required");
  }
  auto raster = detail::decode_pfm_raster(bytes, h);
  for (float v : raster) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kFormat, "non-finite sample in PFM plane");
    }
  }
  return Plane(h.width, h.height, std::move(raster));
}

inline Plane read_pfm_plane(const std::filesystem::path& path) {
  try {
    return decode_pfm_plane(detail::read_file_bytes(path));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kFormat) throw;
    throw e.with_context(path.string());
  }
}

inline void write_pfm_plane(const Plane& plane,
                            const std::filesystem::path& path) {
  detail::write_file_bytes(
      path, detail::encode_pfm(plane.width(), plane.height(), 1, plane.data()));
}

}  // namespace relightkit
