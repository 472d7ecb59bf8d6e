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

// 8-bit PNG I/O on top of libpng's simplified API. Only 8-bit RGB (images)
// and 8-bit gray (masks) are accepted on read; anything else is a format
// error rather than a silent conversion.

#include <png.h>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "relightkit/image.hpp"
#include "relightkit/pfm.hpp"

namespace relightkit {

namespace detail {

// RAII over png_image; releases libpng state on every exit path.
class PngImage {
 public:
  PngImage() {
    std::memset(&image_, 0, sizeof(image_));
    image_.version = PNG_IMAGE_VERSION;
  }
  ~PngImage() { png_image_free(&image_); }
  PngImage(const PngImage&) = delete;
  PngImage& operator=(const PngImage&) = delete;

  png_image* get() { return &image_; }
  png_image* operator->() { return &image_; }

 private:
  png_image image_;
};

inline std::string describe_png_format(png_uint_32 format) {
  std::string s;
  if (format & PNG_FORMAT_FLAG_LINEAR) s += "16-bit ";
  if (format & PNG_FORMAT_FLAG_COLORMAP) s += "palette ";
  s += (format & PNG_FORMAT_FLAG_COLOR) ? "color" : "gray";
  if (format & PNG_FORMAT_FLAG_ALPHA) s += "+alpha";
  return s;
}

// Decodes a PNG whose native format must be exactly `want_format`.
inline std::vector<std::uint8_t> decode_png_exact(
    const std::vector<std::uint8_t>& bytes, png_uint_32 want_format,
    const char* want_name, int* width, int* height) {
  PngImage png;
  if (!png_image_begin_read_from_memory(png.get(), bytes.data(), bytes.size())) {
    throw Error(ErrorCode::kFormat,
                std::string("PNG decode failed: ") + png->message);
  }
  if (png->format != want_format) {
    throw Error(ErrorCode::kFormat,
                "PNG is " + describe_png_format(png->format) +
                    ", expected 8-bit " + want_name);
  }
  std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(*png.get()));
  if (!png_image_finish_read(png.get(), nullptr, pixels.data(), 0, nullptr)) {
    throw Error(ErrorCode::kFormat,
                std::string("PNG decode failed: ") + png->message);
  }
  *width = static_cast<int>(png->width);
  *height = static_cast<int>(png->height);
  return pixels;
}

inline std::string encode_png_raw(int width, int height, png_uint_32 format,
                                  const std::uint8_t* pixels) {
  PngImage png;
  png->width = static_cast<png_uint_32>(width);
  png->height = static_cast<png_uint_32>(height);
  png->format = format;
  png_alloc_size_t size = 0;
  if (!png_image_write_get_memory_size(*png.get(), size, 0, pixels, 0,
                                       nullptr)) {
    throw Error(ErrorCode::kIo, std::string("PNG encode failed: ") + png->message);
  }
  std::string out(size, '\0');
  if (!png_image_write_to_memory(png.get(), out.data(), &size, 0, pixels, 0,
                                 nullptr)) {
    throw Error(ErrorCode::kIo, std::string("PNG encode failed: ") + png->message);
  }
  out.resize(size);
  return out;
}

}  // namespace detail

inline std::string encode_png(const SdrImage& img) {
  return detail::encode_png_raw(img.width(), img.height(), PNG_FORMAT_RGB,
                                img.data().data());
}

inline SdrImage decode_png(const std::vector<std::uint8_t>& bytes) {
  int w = 0;
  int h = 0;
  auto pixels = detail::decode_png_exact(bytes, PNG_FORMAT_RGB, "RGB", &w, &h);
  return SdrImage(w, h, std::move(pixels));
}

inline SdrImage decode_png(const std::string& bytes) {
  return decode_png(std::vector<std::uint8_t>(bytes.begin(), bytes.end()));
}

inline SdrImage read_png(const std::filesystem::path& path) {
  try {
    return decode_png(detail::read_file_bytes(path));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kFormat) throw;
    throw e.with_context(path.string());
  }
}

inline void write_png(const SdrImage& img, const std::filesystem::path& path) {
  detail::write_file_bytes(path, encode_png(img));
}

using GrayImage = Image<std::uint8_t, 1>;

inline std::string encode_png(const GrayImage& img) {
  return detail::encode_png_raw(img.width(), img.height(), PNG_FORMAT_GRAY,
                                img.data().data());
}

inline GrayImage decode_png_gray(const std::vector<std::uint8_t>& bytes) {
  int w = 0;
  int h = 0;
  auto pixels =
      detail::decode_png_exact(bytes, PNG_FORMAT_GRAY, "single-channel gray", &w, &h);
  return GrayImage(w, h, std::move(pixels));
}

inline GrayImage read_png_gray(const std::filesystem::path& path) {
  try {
    return decode_png_gray(detail::read_file_bytes(path));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kFormat) throw;
    throw e.with_context(path.string());
  }
}

inline void write_png(const GrayImage& img, const std::filesystem::path& path) {
  detail::write_file_bytes(path, encode_png(img));
}

}  // namespace relightkit
