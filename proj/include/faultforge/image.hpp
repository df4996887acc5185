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

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "faultforge/error.hpp"

namespace faultforge {

/// Evaluation frames default to 224x224; every operation accepts any size
/// of at least kMinImageEdge on both axes.
inline constexpr int kDefaultImageEdge = 224;
inline constexpr int kMinImageEdge = 8;

/// 8-bit RGB raster, row-major, 3 bytes per pixel.
struct ImageBuffer {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  ImageBuffer() = default;
  ImageBuffer(int w, int h)
      : width(w),
        height(h),
        pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3) {
  }

  [[nodiscard]] static ImageBuffer filled(int w, int h,
                                          std::array<std::uint8_t, 3> rgb) {
    ImageBuffer img(w, h);
    for (std::size_t i = 0; i < img.pixels.size(); i += 3) {
      img.pixels[i] = rgb[0];
      img.pixels[i + 1] = rgb[1];
      img.pixels[i + 2] = rgb[2];
    }
    return img;
  }

  [[nodiscard]] bool valid() const noexcept {
    return width > 0 && height > 0 &&
           pixels.size() == static_cast<std::size_t>(width) *
                                static_cast<std::size_t>(height) * 3;
  }

  [[nodiscard]] std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }

  [[nodiscard]] std::uint8_t& at(int x, int y, int c) {
    return pixels[(static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                   static_cast<std::size_t>(x)) *
                      3 +
                  static_cast<std::size_t>(c)];
  }

  [[nodiscard]] std::uint8_t at(int x, int y, int c) const {
    return pixels[(static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                   static_cast<std::size_t>(x)) *
                      3 +
                  static_cast<std::size_t>(c)];
  }

  bool operator==(const ImageBuffer&) const = default;
};

/// Throws UnsupportedSizeError unless the image is valid and at least
/// kMinImageEdge x kMinImageEdge.
inline void require_supported_size(const ImageBuffer& img) {
  if (!img.valid()) {
    throw UnsupportedSizeError("image buffer is malformed (pixel count " +
                               std::to_string(img.pixels.size()) + ")");
  }
  if (img.width < kMinImageEdge || img.height < kMinImageEdge) {
    throw UnsupportedSizeError(
        "image must be at least " + std::to_string(kMinImageEdge) + "x" +
        std::to_string(kMinImageEdge) + ", got " + std::to_string(img.width) +
        "x" + std::to_string(img.height));
  }
}

namespace io {

/// Raw dump format used by golden tests: width u32 LE, height u32 LE, then
/// width*height*3 pixel bytes.
[[nodiscard]] inline std::vector<std::uint8_t> write_rgb(
    const ImageBuffer& img) {
  if (!img.valid()) throw UnsupportedSizeError("cannot dump malformed image");
  std::vector<std::uint8_t> out;
  out.reserve(8 + img.pixels.size());
  const auto put_u32 = [&](std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xFF));
  };
  put_u32(static_cast<std::uint32_t>(img.width));
  put_u32(static_cast<std::uint32_t>(img.height));
  out.insert(out.end(), img.pixels.begin(), img.pixels.end());
  return out;
}

[[nodiscard]] inline ImageBuffer read_rgb(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8) throw TruncationError("rgb dump shorter than header");
  const auto get_u32 = [&](std::size_t off) {
    return static_cast<std::uint32_t>(bytes[off]) |
           (static_cast<std::uint32_t>(bytes[off + 1]) << 8) |
           (static_cast<std::uint32_t>(bytes[off + 2]) << 16) |
           (static_cast<std::uint32_t>(bytes[off + 3]) << 24);
  };
  const std::uint32_t w = get_u32(0);
  const std::uint32_t h = get_u32(4);
  const std::size_t expected = static_cast<std::size_t>(w) * h * 3;
  if (bytes.size() != 8 + expected) {
    throw TruncationError("rgb dump payload size mismatch");
  }
  ImageBuffer img(static_cast<int>(w), static_cast<int>(h));
  std::copy(bytes.begin() + 8, bytes.end(), img.pixels.begin());
  return img;
}

}  // namespace io
}  // namespace faultforge
