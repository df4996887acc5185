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

namespace faultforge::detail {

// CRC-32 (IEEE 802.3, reflected polynomial 0xEDB88320), same parameters as
// zlib's crc32().
consteval std::array<std::uint32_t, 256> make_crc32_table() {
  std::array<std::uint32_t, 256> table{};
  for (std::uint32_t i = 0; i < 256; ++i) {
    std::uint32_t c = i;
    for (int j = 0; j < 8; ++j) {
      c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
    }
    table[i] = c;
  }
  return table;
}

inline constexpr auto kCrc32Table = make_crc32_table();

[[nodiscard]] constexpr std::uint32_t crc32(std::span<const std::uint8_t> data,
                                            std::uint32_t seed = 0) noexcept {
  std::uint32_t crc = ~seed;
  for (std::uint8_t b : data) {
    crc = (crc >> 8) ^ kCrc32Table[(crc ^ b) & 0xFFu];
  }
  return ~crc;
}

}  // namespace faultforge::detail
