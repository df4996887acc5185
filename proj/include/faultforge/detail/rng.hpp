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

#include <cmath>
#include <cstdint>
#include <numbers>

namespace faultforge::detail {

inline constexpr std::uint64_t kGolden64 = 0x9E3779B97F4A7C15ull;

/// SplitMix64 finalizer.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Counter-addressable hash: the SplitMix64 output at stream position
/// `counter` for the given seed. Results do not depend on call order, so
/// consumers may evaluate pixels/primitives in any order.
[[nodiscard]] constexpr std::uint64_t hash_at(std::uint64_t seed,
                                              std::uint64_t counter) noexcept {
  return mix64(seed + (counter + 1) * kGolden64);
}

/// Derives an independent seed for one purpose (noise, primitives, geometry)
/// within a kernel so counter spaces never collide.
[[nodiscard]] constexpr std::uint64_t substream(std::uint64_t seed,
                                                std::uint64_t tag) noexcept {
  return mix64(mix64(seed ^ kGolden64) + tag);
}

/// Uniform double in [0, 1).
[[nodiscard]] constexpr double uniform_at(std::uint64_t seed,
                                          std::uint64_t counter) noexcept {
  return static_cast<double>(hash_at(seed, counter) >> 11) * 0x1.0p-53;
}

/// Uniform byte.
[[nodiscard]] constexpr std::uint8_t byte_at(std::uint64_t seed,
                                             std::uint64_t counter) noexcept {
  return static_cast<std::uint8_t>(hash_at(seed, counter) >> 56);
}

/// Standard normal via Box-Muller; consumes counters 2c and 2c+1.
[[nodiscard]] inline double gaussian_at(std::uint64_t seed,
                                        std::uint64_t counter) noexcept {
  // u1 in (0, 1] so the log is finite.
  const double u1 =
      static_cast<double>((hash_at(seed, 2 * counter) >> 11) + 1) * 0x1.0p-53;
  const double u2 = uniform_at(seed, 2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace faultforge::detail
