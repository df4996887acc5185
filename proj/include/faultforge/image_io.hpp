//
// Copyright 2026 The FaultForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <vector>

#include <png.h>

#include "faultforge/error.hpp"
#include "faultforge/image.hpp"

namespace faultforge::io {

/// Lossless 8-bit RGB PNG encoding (libpng simplified API). Output bytes are
/// deterministic for a given image.
[[nodiscard]] inline std::vector<std::uint8_t> encode_png(
    const ImageBuffer& img) {
  if (!img.valid()) throw UnsupportedSizeError("cannot encode malformed image");
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(img.width);
  png.height = static_cast<png_uint_32>(img.height);
  png.format = PNG_FORMAT_RGB;

  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&png, nullptr, &size, 0, img.pixels.data(),
                                 0, nullptr)) {
    throw Error(std::string("png size probe failed: ") + png.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&png, out.data(), &size, 0,
                                 img.pixels.data(), 0, nullptr)) {
    throw Error(std::string("png encode failed: ") + png.message);
  }
  out.resize(size);
  return out;
}

/// Decodes any readable PNG to 8-bit RGB (other layouts are converted).
[[nodiscard]] inline ImageBuffer decode_png(
    std::span<const std::uint8_t> bytes) {
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&png, bytes.data(), bytes.size())) {
    throw DecodeError(std::string("png decode failed: ") + png.message);
  }
  png.format = PNG_FORMAT_RGB;
  ImageBuffer img(static_cast<int>(png.width), static_cast<int>(png.height));
  if (!png_image_finish_read(&png, nullptr, img.pixels.data(), 0, nullptr)) {
    throw DecodeError(std::string("png decode failed: ") + png.message);
  }
  return img;
}

[[nodiscard]] inline std::vector<std::uint8_t> read_file(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw Error("read failed for " + path.string());
  return bytes;
}

inline void write_file(const std::filesystem::path& path,
                       std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed for " + path.string());
}

[[nodiscard]] inline ImageBuffer read_png(const std::filesystem::path& path) {
  return decode_png(read_file(path));
}

inline void write_png(const std::filesystem::path& path,
                      const ImageBuffer& img) {
  write_file(path, encode_png(img));
}

}  // namespace faultforge::io
