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

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "faultforge/detail/rng.hpp"
#include "faultforge/image.hpp"
#include "faultforge/perception.hpp"

namespace testsupport {

/// Fixed probe set for degradation properties: half synthetic-track
/// fixtures (noise-dominated), half smooth-gradient scenes with bright and
/// dark discs (structure-dominated) so geometric warps register clearly.
inline std::vector<faultforge::ImageBuffer> probe_set(std::size_t count = 32,
                                                      std::uint64_t seed =
                                                          0xFF00D) {
  namespace ff = faultforge;
  std::vector<ff::ImageBuffer> out;
  out.reserve(count);

  const auto track = ff::perception::gen_synthetic_track(count / 2, seed);
  for (const auto& [img, truth] : track) out.push_back(img);

  constexpr int kEdge = ff::kDefaultImageEdge;
  for (std::size_t i = out.size(); i < count; ++i) {
    const std::uint64_t s = ff::detail::substream(seed, 1000 + i);
    ff::ImageBuffer img(kEdge, kEdge);
    struct Disc {
      double x, y, r;
      std::uint8_t value;
    };
    std::array<Disc, 4> discs{};
    for (std::size_t d = 0; d < discs.size(); ++d) {
      discs[d] = {ff::detail::uniform_at(s, 3 * d) * (kEdge - 1),
                  ff::detail::uniform_at(s, 3 * d + 1) * (kEdge - 1),
                  12.0 + 8.0 * ff::detail::uniform_at(s, 3 * d + 2),
                  d < 2 ? std::uint8_t{255} : std::uint8_t{0}};
    }
    for (int y = 0; y < kEdge; ++y) {
      for (int x = 0; x < kEdge; ++x) {
        double v = 255.0 * (0.55 * x / (kEdge - 1.0) + 0.45 * y / (kEdge - 1.0));
        for (const auto& disc : discs) {
          const double dx = x - disc.x;
          const double dy = y - disc.y;
          if (dx * dx + dy * dy <= disc.r * disc.r) v = disc.value;
        }
        const auto byte = static_cast<std::uint8_t>(
            std::nearbyint(std::clamp(v, 0.0, 255.0)));
        img.at(x, y, 0) = byte;
        img.at(x, y, 1) = byte;
        img.at(x, y, 2) = byte;
      }
    }
    out.push_back(std::move(img));
  }
  return out;
}

/// Unique scratch directory under the system temp root.
inline std::filesystem::path make_temp_dir(const std::string& tag) {
  auto base = std::filesystem::temp_directory_path() /
              ("faultforge_" + tag + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(base);
  std::filesystem::create_directories(base);
  return base;
}

struct CommandResult {
  int exit_code = -1;
  std::string output;
};

/// Runs a shell command, capturing combined stdout/stderr.
inline CommandResult run_command(const std::string& command) {
  CommandResult result;
  FILE* pipe = ::popen((command + " 2>&1").c_str(), "r");
  if (pipe == nullptr) return result;
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof(buf), pipe)) > 0) {
    result.output.append(buf, n);
  }
  const int status = ::pclose(pipe);
  if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
  return result;
}

}  // namespace testsupport
