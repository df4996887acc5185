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

#include <algorithm>
#include <array>
#include <cfenv>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "faultforge/detail/rng.hpp"
#include "faultforge/error.hpp"
#include "faultforge/image.hpp"
#include "faultforge/scenario.hpp"

namespace faultforge::degrade {

struct DegradationSpec {
  scenario::FaultCategory category;
  double strength = 0.0;
  std::uint64_t seed = 0;
};

/// Engine defaults for every kernel. The single strength scalar is the only
/// per-scenario control; everything else is a tunable default collected here.
struct KernelDefaults {
  std::array<double, 3> fog_tint{200.0, 200.0, 200.0};
  double fog_alpha_base = 0.35;   // alpha at the bottom row, times strength
  double fog_alpha_span = 0.65;   // extra alpha at the top row

  std::array<double, 3> dust_tint{180.0, 150.0, 110.0};
  double dust_alpha = 0.8;

  double frost_blur_mask_cut = 0.6;  // blur where the noise mask exceeds this

  double rain_streak_count = 200.0;
  double rain_length_min = 8.0;
  double rain_length_max = 20.0;
  double rain_angle_jitter_deg = 10.0;  // around vertical
  double rain_alpha = 0.35;
  double rain_blur_threshold = 0.5;
  std::array<double, 3> rain_color{215.0, 222.0, 230.0};

  double motion_blur_reach = 7.0;  // kernel length 1 + 2*round(reach*s)
  double shake_magnitude_px = 6.0;

  double chroma_shift_px = 5.0;

  double barrel_coeff = 0.5;
  double fisheye_coeff = 1.2;
  double lens_coeff = 0.35;
  double lens_chroma_px = 2.0;
  double perspective_inset_frac = 0.25;
  double yaw_max_deg = 10.0;

  double dead_pixel_frac = 0.05;

  double banding_amplitude = 40.0;
  double banding_period_min = 8.0;
  double banding_period_max = 32.0;

  double heat_sigma = 12.0;
  double heat_tint = 10.0;  // added to R and B
  double overheat_band_frac = 0.2;

  double failure_band_frac = 0.5;       // times strength, of the height
  double failure_noise_threshold = 0.9;  // full-frame noise at or above

  double glare_radius_frac = 0.4;  // of width, times strength
  double glare_intensity = 220.0;
  double glare_quad_area_frac = 0.15;  // of frame area, times strength
  std::array<double, 3> glare_quad_fill{128.0, 128.0, 128.0};

  double lowlight_dim = 0.8;
  double lowlight_sigma = 10.0;
  double lowlight_vignette_gain = 1.5;

  double night_blue_shift = 40.0;
  double night_red_shift = 20.0;
  double night_dim = 0.3;
};

inline constexpr KernelDefaults kDefaults{};

namespace detail_kernels {

using faultforge::detail::byte_at;
using faultforge::detail::gaussian_at;
using faultforge::detail::hash_at;
using faultforge::detail::substream;
using faultforge::detail::uniform_at;

// Substream tags so independent random purposes never share counters.
inline constexpr std::uint64_t kTagNoise = 1;
inline constexpr std::uint64_t kTagPrimitive = 2;
inline constexpr std::uint64_t kTagGeometry = 3;
inline constexpr std::uint64_t kTagMask = 4;

/// Channel math happens on doubles; bytes are produced once at the end.
struct RealImage {
  int w = 0;
  int h = 0;
  std::vector<double> v;  // w*h*3 row-major RGB

  RealImage(int width, int height)
      : w(width),
        h(height),
        v(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) *
          3) {}

  [[nodiscard]] double& at(int x, int y, int c) {
    return v[(static_cast<std::size_t>(y) * static_cast<std::size_t>(w) +
              static_cast<std::size_t>(x)) *
                 3 +
             static_cast<std::size_t>(c)];
  }
  [[nodiscard]] double at(int x, int y, int c) const {
    return v[(static_cast<std::size_t>(y) * static_cast<std::size_t>(w) +
              static_cast<std::size_t>(x)) *
                 3 +
             static_cast<std::size_t>(c)];
  }
};

[[nodiscard]] inline RealImage to_real(const ImageBuffer& img) {
  RealImage out(img.width, img.height);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    out.v[i] = static_cast<double>(img.pixels[i]);
  }
  return out;
}

/// Clamp to [0,255], then round half-to-even (the default FP environment).
[[nodiscard]] inline ImageBuffer finalize(const RealImage& real) {
  ImageBuffer out(real.w, real.h);
  for (std::size_t i = 0; i < real.v.size(); ++i) {
    const double clamped = std::clamp(real.v[i], 0.0, 255.0);
    out.pixels[i] = static_cast<std::uint8_t>(std::nearbyint(clamped));
  }
  return out;
}

/// Bilinear sample with edge replication (coordinates clamped to the frame).
[[nodiscard]] inline double sample_bilinear(const ImageBuffer& src, double x,
                                            double y, int c) {
  x = std::clamp(x, 0.0, static_cast<double>(src.width - 1));
  y = std::clamp(y, 0.0, static_cast<double>(src.height - 1));
  const int x0 = static_cast<int>(x);
  const int y0 = static_cast<int>(y);
  const int x1 = std::min(x0 + 1, src.width - 1);
  const int y1 = std::min(y0 + 1, src.height - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const double top = (1.0 - fx) * src.at(x0, y0, c) + fx * src.at(x1, y0, c);
  const double bot = (1.0 - fx) * src.at(x0, y1, c) + fx * src.at(x1, y1, c);
  return (1.0 - fy) * top + fy * bot;
}

/// 3x3 box blur with edge replication.
[[nodiscard]] inline RealImage box_blur3(const RealImage& src) {
  RealImage out(src.w, src.h);
  for (int y = 0; y < src.h; ++y) {
    for (int x = 0; x < src.w; ++x) {
      for (int c = 0; c < 3; ++c) {
        double sum = 0.0;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int sx = std::clamp(x + dx, 0, src.w - 1);
            const int sy = std::clamp(y + dy, 0, src.h - 1);
            sum += src.at(sx, sy, c);
          }
        }
        out.at(x, y, c) = sum / 9.0;
      }
    }
  }
  return out;
}

/// Seeded low-frequency value noise in [0,1]: random lattice values,
/// smoothstep-interpolated.
class ValueNoise {
 public:
  ValueNoise(std::uint64_t seed, int w, int h) : seed_(seed) {
    cell_ = std::max(4, std::min(32, std::min(w, h) / 4));
  }

  [[nodiscard]] double operator()(int x, int y) const {
    const double gx = static_cast<double>(x) / cell_;
    const double gy = static_cast<double>(y) / cell_;
    const int ix = static_cast<int>(gx);
    const int iy = static_cast<int>(gy);
    const double fx = smooth(gx - ix);
    const double fy = smooth(gy - iy);
    const double v00 = lattice(ix, iy);
    const double v10 = lattice(ix + 1, iy);
    const double v01 = lattice(ix, iy + 1);
    const double v11 = lattice(ix + 1, iy + 1);
    const double top = (1.0 - fx) * v00 + fx * v10;
    const double bot = (1.0 - fx) * v01 + fx * v11;
    return (1.0 - fy) * top + fy * bot;
  }

 private:
  [[nodiscard]] static double smooth(double t) { return t * t * (3.0 - 2.0 * t); }
  [[nodiscard]] double lattice(int gx, int gy) const {
    return uniform_at(seed_, static_cast<std::uint64_t>(gy) * 65536u +
                                 static_cast<std::uint64_t>(gx));
  }
  std::uint64_t seed_;
  int cell_;
};

[[nodiscard]] inline double deg_to_rad(double deg) {
  return deg * std::numbers::pi / 180.0;
}

// --- atmospheric -----------------------------------------------------------

[[nodiscard]] inline RealImage fog(const ImageBuffer& in, double s) {
  RealImage out(in.width, in.height);
  for (int y = 0; y < in.height; ++y) {
    const double a = s * (kDefaults.fog_alpha_base +
                          kDefaults.fog_alpha_span *
                              (1.0 - static_cast<double>(y) / in.height));
    for (int x = 0; x < in.width; ++x) {
      for (int c = 0; c < 3; ++c) {
        out.at(x, y, c) =
            (1.0 - a) * in.at(x, y, c) + a * kDefaults.fog_tint[c];
      }
    }
  }
  return out;
}

[[nodiscard]] inline RealImage dust_storm(const ImageBuffer& in, double s) {
  RealImage out(in.width, in.height);
  const double a = kDefaults.dust_alpha * s;
  for (int y = 0; y < in.height; ++y) {
    for (int x = 0; x < in.width; ++x) {
      for (int c = 0; c < 3; ++c) {
        out.at(x, y, c) =
            (1.0 - a) * in.at(x, y, c) + a * kDefaults.dust_tint[c];
      }
    }
  }
  return out;
}

[[nodiscard]] inline RealImage frost_coating(const ImageBuffer& in, double s,
                                             std::uint64_t seed) {
  const ValueNoise mask(substream(seed, kTagMask), in.width, in.height);
  RealImage blended(in.width, in.height);
  for (int y = 0; y < in.height; ++y) {
    for (int x = 0; x < in.width; ++x) {
      const double a = s * mask(x, y);
      for (int c = 0; c < 3; ++c) {
        blended.at(x, y, c) = (1.0 - a) * in.at(x, y, c) + a * 255.0;
      }
    }
  }
  const RealImage blurred = box_blur3(blended);
  RealImage out(in.width, in.height);
  for (int y = 0; y < in.height; ++y) {
    for (int x = 0; x < in.width; ++x) {
      const bool thick = mask(x, y) > kDefaults.frost_blur_mask_cut;
      for (int c = 0; c < 3; ++c) {
        out.at(x, y, c) = thick ? blurred.at(x, y, c) : blended.at(x, y, c);
      }
    }
  }
  return out;
}

[[nodiscard]] inline RealImage rain(const ImageBuffer& in, double s,
                                    std::uint64_t seed) {
  RealImage out = to_real(in);
  const auto n = static_cast<std::size_t>(std::llround(
      kDefaults.rain_streak_count * s));
  const std::uint64_t prim = substream(seed, kTagPrimitive);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t base = i * 8;
    const double x0 = uniform_at(prim, base) * (in.width - 1);
    const double y0 = uniform_at(prim, base + 1) * (in.height - 1);
    const double len =
        kDefaults.rain_length_min +
        (kDefaults.rain_length_max - kDefaults.rain_length_min) *
            uniform_at(prim, base + 2);
    const double angle =
        deg_to_rad(90.0 + kDefaults.rain_angle_jitter_deg *
                              (2.0 * uniform_at(prim, base + 3) - 1.0));
    const double x1 = x0 + len * std::cos(angle);
    const double y1 = y0 + len * std::sin(angle);

    const int min_x = std::max(0, static_cast<int>(std::floor(std::min(x0, x1))) - 2);
    const int max_x = std::min(in.width - 1,
                               static_cast<int>(std::ceil(std::max(x0, x1))) + 2);
    const int min_y = std::max(0, static_cast<int>(std::floor(std::min(y0, y1))) - 2);
    const int max_y = std::min(in.height - 1,
                               static_cast<int>(std::ceil(std::max(y0, y1))) + 2);

    const double dx = x1 - x0;
    const double dy = y1 - y0;
    const double len_sq = dx * dx + dy * dy;
    for (int y = min_y; y <= max_y; ++y) {
      for (int x = min_x; x <= max_x; ++x) {
        const double t = len_sq > 0.0
                             ? std::clamp(((x - x0) * dx + (y - y0) * dy) /
                                              len_sq,
                                          0.0, 1.0)
                             : 0.0;
        const double px = x0 + t * dx;
        const double py = y0 + t * dy;
        const double dist = std::hypot(x - px, y - py);
        const double coverage = std::clamp(1.25 - dist, 0.0, 1.0);
        if (coverage <= 0.0) continue;
        const double a = kDefaults.rain_alpha * coverage;
        for (int c = 0; c < 3; ++c) {
          out.at(x, y, c) =
              (1.0 - a) * out.at(x, y, c) + a * kDefaults.rain_color[c];
        }
      }
    }
  }
  if (s > kDefaults.rain_blur_threshold) out = box_blur3(out);
  return out;
}

// --- motion / geometric ----------------------------------------------------

[[nodiscard]] inline RealImage motion_blur(const ImageBuffer& in, double s) {
  const int reach = static_cast<int>(std::llround(kDefaults.motion_blur_reach * s));
  const int k = 1 + 2 * reach;
  RealImage out(in.width, in.height);
  for (int y = 0; y < in.height; ++y) {
    for (int x = 0; x < in.width; ++x) {
      for (int c = 0; c < 3; ++c) {
        double sum = 0.0;
        for (int d = -reach; d <= reach; ++d) {
          sum += in.at(std::clamp(x + d, 0, in.width - 1), y, c);
        }
        out.at(x, y, c) = sum / k;
      }
    }
  }
  return out;
}

[[nodiscard]] inline RealImage camera_shake(const ImageBuffer& in, double s,
                                            std::uint64_t seed) {
  const double mag = std::llround(kDefaults.shake_magnitude_px * s);
  const std::uint64_t geo = substream(seed, kTagGeometry);
  std::array<std::array<int, 2>, 3> offsets{};
  for (std::size_t j = 0; j < 3; ++j) {
    offsets[j][0] = static_cast<int>(
        std::llround((2.0 * uniform_at(geo, j * 2) - 1.0) * mag));
    offsets[j][1] = static_cast<int>(
        std::llround((2.0 * uniform_at(geo, j * 2 + 1) - 1.0) * mag));
  }
  RealImage out(in.width, in.height);
  for (int y = 0; y < in.height; ++y) {
    for (int x = 0; x < in.width; ++x) {
      for (int c = 0; c < 3; ++c) {
        double sum = 0.0;
        for (const auto& off : offsets) {
          const int sx = std::clamp(x - off[0], 0, in.width - 1);
          const int sy = std::clamp(y - off[1], 0, in.height - 1);
          sum += in.at(sx, sy, c);
        }
        out.at(x, y, c) = sum / 3.0;
      }
    }
  }
  return out;
}

[[nodiscard]] inline RealImage camera_yaw(const ImageBuffer& in, double s) {
  const double shear = std::tan(deg_to_rad(kDefaults.yaw_max_deg * s));
  RealImage out(in.width, in.height);
  for (int y = 0; y < in.height; ++y) {
    const double dx = shear * (y - in.height / 2.0);
    for (int x = 0; x < in.width; ++x) {
      for (int c = 0; c < 3; ++c) {
        out.at(x, y, c) = sample_bilinear(in, x + dx, y, c);
      }
    }
  }
  return out;
}

/// Inverse radial model: r_src = r_dst * (1 + k * (r_dst / r_max)^2).
[[nodiscard]] inline RealImage radial_warp(const ImageBuffer& in, double k) {
  const double cx = (in.width - 1) / 2.0;
  const double cy = (in.height - 1) / 2.0;
  const double r_max_sq = cx * cx + cy * cy;
  RealImage out(in.width, in.height);
  for (int y = 0; y < in.height; ++y) {
    for (int x = 0; x < in.width; ++x) {
      const double dx = x - cx;
      const double dy = y - cy;
      const double scale = 1.0 + k * ((dx * dx + dy * dy) / r_max_sq);
      const double sx = cx + dx * scale;
      const double sy = cy + dy * scale;
      for (int c = 0; c < 3; ++c) {
        out.at(x, y, c) = sample_bilinear(in, sx, sy, c);
      }
    }
  }
  return out;
}

/// Red +d, blue -d horizontal shift with edge replication; reads `src`,
/// which may already be a warped intermediate.
[[nodiscard]] inline RealImage chromatic_shift(const RealImage& src, int d) {
  RealImage out(src.w, src.h);
  for (int y = 0; y < src.h; ++y) {
    for (int x = 0; x < src.w; ++x) {
      out.at(x, y, 0) = src.at(std::clamp(x - d, 0, src.w - 1), y, 0);
      out.at(x, y, 1) = src.at(x, y, 1);
      out.at(x, y, 2) = src.at(std::clamp(x + d, 0, src.w - 1), y, 2);
    }
  }
  return out;
}

/// Solves the 8-unknown projective mapping taking each dst[i] to src[i]
/// (h33 fixed at 1), by Gaussian elimination with partial pivoting.
[[nodiscard]] inline std::array<double, 9> homography(
    const std::array<std::array<double, 2>, 4>& dst,
    const std::array<std::array<double, 2>, 4>& src) {
  double m[8][9] = {};
  for (int i = 0; i < 4; ++i) {
    const double xd = dst[i][0], yd = dst[i][1];
    const double xs = src[i][0], ys = src[i][1];
    double* r0 = m[2 * i];
    double* r1 = m[2 * i + 1];
    r0[0] = xd; r0[1] = yd; r0[2] = 1; r0[6] = -xd * xs; r0[7] = -yd * xs;
    r0[8] = xs;
    r1[3] = xd; r1[4] = yd; r1[5] = 1; r1[6] = -xd * ys; r1[7] = -yd * ys;
    r1[8] = ys;
  }
  for (int col = 0; col < 8; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 8; ++r) {
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    }
    if (std::abs(m[pivot][col]) < 1e-12) {
      throw std::invalid_argument("degenerate perspective quad");
    }
    std::swap_ranges(m[col], m[col] + 9, m[pivot]);
    for (int r = 0; r < 8; ++r) {
      if (r == col) continue;
      const double f = m[r][col] / m[col][col];
      for (int c2 = col; c2 < 9; ++c2) m[r][c2] -= f * m[col][c2];
    }
  }
  std::array<double, 9> h{};
  for (int i = 0; i < 8; ++i) h[static_cast<std::size_t>(i)] = m[i][8] / m[i][i];
  h[8] = 1.0;
  return h;
}

[[nodiscard]] inline RealImage perspective(const ImageBuffer& in, double s) {
  const int inset = static_cast<int>(
      std::llround(kDefaults.perspective_inset_frac * s * in.width));
  if (inset == 0) return to_real(in);
  const double w1 = in.width - 1.0;
  const double h1 = in.height - 1.0;
  // Top corners of the output quad move inward; everything else is pinned.
  const std::array<std::array<double, 2>, 4> dst{{
      {static_cast<double>(inset), 0.0},
      {w1 - inset, 0.0},
      {w1, h1},
      {0.0, h1},
  }};
  const std::array<std::array<double, 2>, 4> src{{
      {0.0, 0.0},
      {w1, 0.0},
      {w1, h1},
      {0.0, h1},
  }};
  const auto h = homography(dst, src);
  RealImage out(in.width, in.height);
  for (int y = 0; y < in.height; ++y) {
    for (int x = 0; x < in.width; ++x) {
      const double denom = h[6] * x + h[7] * y + h[8];
      const double sx = (h[0] * x + h[1] * y + h[2]) / denom;
      const double sy = (h[3] * x + h[4] * y + h[5]) / denom;
      for (int c = 0; c < 3; ++c) {
        out.at(x, y, c) = sample_bilinear(in, sx, sy, c);
      }
    }
  }
  return out;
}

// --- sensor / hardware -----------------------------------------------------

[[nodiscard]] inline RealImage dead_pixels(const ImageBuffer& in, double s,
                                           std::uint64_t seed) {
  RealImage out = to_real(in);
  const auto total = in.pixel_count();
  const auto target = static_cast<std::size_t>(
      std::floor(kDefaults.dead_pixel_frac * s * static_cast<double>(total)));
  const std::uint64_t prim = substream(seed, kTagPrimitive);
  std::vector<std::uint8_t> taken(total, 0);
  std::uint64_t counter = 0;
  std::size_t selected = 0;
  while (selected < target) {
    const std::size_t idx =
        static_cast<std::size_t>(hash_at(prim, counter++) % total);
    if (taken[idx]) continue;
    taken[idx] = 1;
    out.v[idx * 3] = 0.0;
    out.v[idx * 3 + 1] = 0.0;
    out.v[idx * 3 + 2] = 0.0;
    ++selected;
  }
  return out;
}

[[nodiscard]] inline RealImage camera_banding(const ImageBuffer& in, double s,
                                              std::uint64_t seed) {
  const std::uint64_t geo = substream(seed, kTagGeometry);
  const double period =
      kDefaults.banding_period_min +
      (kDefaults.banding_period_max - kDefaults.banding_period_min) *
          uniform_at(geo, 0);
  const double amplitude = kDefaults.banding_amplitude * s;
  RealImage out(in.width, in.height);
  for (int y = 0; y < in.height; ++y) {
    const double add =
        amplitude * std::sin(2.0 * std::numbers::pi * y / period);
    for (int x = 0; x < in.width; ++x) {
      for (int c = 0; c < 3; ++c) {
        out.at(x, y, c) = in.at(x, y, c) + add;
      }
    }
  }
  return out;
}

[[nodiscard]] inline RealImage sensor_heat(const ImageBuffer& in, double s,
                                           std::uint64_t seed) {
  const std::uint64_t noise = substream(seed, kTagNoise);
  const double sigma = kDefaults.heat_sigma * s;
  const double tint = kDefaults.heat_tint * s;
  RealImage out(in.width, in.height);
  std::uint64_t counter = 0;
  for (int y = 0; y < in.height; ++y) {
    for (int x = 0; x < in.width; ++x) {
      for (int c = 0; c < 3; ++c) {
        const double t = (c == 1) ? 0.0 : tint;
        out.at(x, y, c) =
            in.at(x, y, c) + sigma * gaussian_at(noise, counter++) + t;
      }
    }
  }
  return out;
}

[[nodiscard]] inline RealImage hw_overheat(const ImageBuffer& in, double s,
                                           std::uint64_t seed) {
  RealImage out = sensor_heat(in, s, seed);
  const int band = static_cast<int>(
      std::llround(kDefaults.overheat_band_frac * s * in.height));
  if (band >= 1 && in.height >= band + 1) {
    const std::uint64_t geo = substream(seed, kTagGeometry);
    const int max_start = in.height - band;  // start >= 1 so a row above exists
    const int start = 1 + static_cast<int>(uniform_at(geo, 0) * max_start);
    // The whole band freezes to the row just above it.
    for (int y = start; y < start + band; ++y) {
      for (int x = 0; x < in.width; ++x) {
        for (int c = 0; c < 3; ++c) {
          out.at(x, y, c) = out.at(x, start - 1, c);
        }
      }
    }
  }
  return out;
}

[[nodiscard]] inline RealImage camera_failure(const ImageBuffer& in, double s,
                                              std::uint64_t seed) {
  if (s >= kDefaults.failure_noise_threshold) {
    RealImage out(in.width, in.height);
    const std::uint64_t noise = substream(seed, kTagNoise);
    for (std::size_t i = 0; i < out.v.size(); ++i) {
      out.v[i] = static_cast<double>(byte_at(noise, i));
    }
    return out;
  }
  RealImage out = to_real(in);
  const int band = static_cast<int>(
      std::llround(kDefaults.failure_band_frac * s * in.height));
  if (band >= 1) {
    const std::uint64_t geo = substream(seed, kTagGeometry);
    const int start =
        static_cast<int>(uniform_at(geo, 0) * (in.height - band + 1));
    for (int y = start; y < start + band; ++y) {
      for (int x = 0; x < in.width; ++x) {
        for (int c = 0; c < 3; ++c) out.at(x, y, c) = 0.0;
      }
    }
  }
  return out;
}

// --- illumination ----------------------------------------------------------

inline void add_radial_blob(RealImage& img, double cx, double cy,
                            double radius, double intensity) {
  if (radius <= 0.0) return;
  const int min_x = std::max(0, static_cast<int>(std::floor(cx - radius)));
  const int max_x =
      std::min(img.w - 1, static_cast<int>(std::ceil(cx + radius)));
  const int min_y = std::max(0, static_cast<int>(std::floor(cy - radius)));
  const int max_y =
      std::min(img.h - 1, static_cast<int>(std::ceil(cy + radius)));
  for (int y = min_y; y <= max_y; ++y) {
    for (int x = min_x; x <= max_x; ++x) {
      const double d = std::hypot(x - cx, y - cy);
      if (d >= radius) continue;
      const double falloff = 1.0 - d / radius;
      const double add = intensity * falloff * falloff;
      for (int c = 0; c < 3; ++c) img.at(x, y, c) += add;
    }
  }
}

/// Even-odd crossing test; the quads we build are simple polygons.
[[nodiscard]] inline bool point_in_quad(
    const std::array<std::array<double, 2>, 4>& q, double x, double y) {
  bool inside = false;
  for (std::size_t i = 0, j = 3; i < 4; j = i++) {
    const double xi = q[i][0], yi = q[i][1];
    const double xj = q[j][0], yj = q[j][1];
    const bool crosses = (yi > y) != (yj > y);
    if (crosses && x < (xj - xi) * (y - yi) / (yj - yi) + xi) {
      inside = !inside;
    }
  }
  return inside;
}

[[nodiscard]] inline RealImage glare(const ImageBuffer& in, double s,
                                     std::uint64_t seed, bool bottom_third,
                                     bool with_quad) {
  RealImage out = to_real(in);
  const std::uint64_t geo = substream(seed, kTagGeometry);
  const double cx = uniform_at(geo, 0) * (in.width - 1);
  const double cy =
      bottom_third
          ? (2.0 / 3.0 + uniform_at(geo, 1) / 3.0) * (in.height - 1)
          : uniform_at(geo, 1) * (in.height - 1);
  add_radial_blob(out, cx, cy, kDefaults.glare_radius_frac * s * in.width,
                  kDefaults.glare_intensity * s);

  if (with_quad) {
    const double area = kDefaults.glare_quad_area_frac * s * in.width *
                        in.height;
    if (area > 0.0) {
      const double aspect = 0.5 + 1.5 * uniform_at(geo, 2);
      const double half_w = std::sqrt(area * aspect) / 2.0;
      const double half_h = std::sqrt(area / aspect) / 2.0;
      const double qx = uniform_at(geo, 3) * (in.width - 1);
      const double qy = uniform_at(geo, 4) * (in.height - 1);
      const double rot = uniform_at(geo, 5) * std::numbers::pi;
      const double cr = std::cos(rot);
      const double sr = std::sin(rot);
      std::array<std::array<double, 2>, 4> quad{};
      constexpr std::array<std::array<double, 2>, 4> corners{{
          {-1.0, -1.0}, {1.0, -1.0}, {1.0, 1.0}, {-1.0, 1.0}}};
      for (std::size_t i = 0; i < 4; ++i) {
        // Pull each corner inward a little so the shape is a generic
        // quadrilateral; shrinking can only reduce coverage.
        const double pull = 1.0 - 0.3 * uniform_at(geo, 6 + i);
        const double lx = corners[i][0] * half_w * pull;
        const double ly = corners[i][1] * half_h * pull;
        quad[i] = {qx + lx * cr - ly * sr, qy + lx * sr + ly * cr};
      }
      double min_x = quad[0][0], max_x = quad[0][0];
      double min_y = quad[0][1], max_y = quad[0][1];
      for (const auto& p : quad) {
        min_x = std::min(min_x, p[0]);
        max_x = std::max(max_x, p[0]);
        min_y = std::min(min_y, p[1]);
        max_y = std::max(max_y, p[1]);
      }
      const int x0 = std::max(0, static_cast<int>(std::floor(min_x)));
      const int x1 = std::min(in.width - 1, static_cast<int>(std::ceil(max_x)));
      const int y0 = std::max(0, static_cast<int>(std::floor(min_y)));
      const int y1 =
          std::min(in.height - 1, static_cast<int>(std::ceil(max_y)));
      for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
          if (!point_in_quad(quad, x, y)) continue;
          for (int c = 0; c < 3; ++c) {
            out.at(x, y, c) = kDefaults.glare_quad_fill[c];
          }
        }
      }
    }
  }
  return out;
}

[[nodiscard]] inline RealImage low_light_tunnel(const ImageBuffer& in,
                                                double s, std::uint64_t seed) {
  const std::uint64_t noise = substream(seed, kTagNoise);
  const double dim = 1.0 - kDefaults.lowlight_dim * s;
  const double sigma = kDefaults.lowlight_sigma * s;
  const double vig = std::min(1.0, kDefaults.lowlight_vignette_gain * s);
  const double cx = (in.width - 1) / 2.0;
  const double cy = (in.height - 1) / 2.0;
  const double r_max_sq = cx * cx + cy * cy;
  RealImage out(in.width, in.height);
  std::uint64_t counter = 0;
  for (int y = 0; y < in.height; ++y) {
    for (int x = 0; x < in.width; ++x) {
      const double dx = x - cx;
      const double dy = y - cy;
      const double vignette = 1.0 - vig * ((dx * dx + dy * dy) / r_max_sq);
      for (int c = 0; c < 3; ++c) {
        const double v =
            in.at(x, y, c) * dim + sigma * gaussian_at(noise, counter++);
        out.at(x, y, c) = v * vignette;
      }
    }
  }
  return out;
}

[[nodiscard]] inline RealImage lens_vignetting(const ImageBuffer& in,
                                               double s) {
  const double cx = (in.width - 1) / 2.0;
  const double cy = (in.height - 1) / 2.0;
  const double r_max_sq = cx * cx + cy * cy;
  RealImage out(in.width, in.height);
  for (int y = 0; y < in.height; ++y) {
    for (int x = 0; x < in.width; ++x) {
      const double dx = x - cx;
      const double dy = y - cy;
      const double factor = 1.0 - s * ((dx * dx + dy * dy) / r_max_sq);
      for (int c = 0; c < 3; ++c) {
        out.at(x, y, c) = in.at(x, y, c) * factor;
      }
    }
  }
  return out;
}

[[nodiscard]] inline RealImage color_shift_night(const ImageBuffer& in,
                                                 double s) {
  const double scale = 1.0 - kDefaults.night_dim * s;
  const double blue = kDefaults.night_blue_shift * s;
  const double red = kDefaults.night_red_shift * s;
  RealImage out(in.width, in.height);
  for (int y = 0; y < in.height; ++y) {
    for (int x = 0; x < in.width; ++x) {
      out.at(x, y, 0) = (in.at(x, y, 0) - red) * scale;
      out.at(x, y, 1) = in.at(x, y, 1) * scale;
      out.at(x, y, 2) = (in.at(x, y, 2) + blue) * scale;
    }
  }
  return out;
}

}  // namespace detail_kernels

/// Applies the per-category degradation kernel. Pure: equal (image, spec)
/// pairs give byte-identical outputs regardless of caller threading. At
/// strength 0 the input is returned unchanged for every category.
[[nodiscard]] inline ImageBuffer apply_fault(const ImageBuffer& image,
                                             const DegradationSpec& spec) {
  require_supported_size(image);
  if (!(spec.strength >= 0.0 && spec.strength <= 1.0)) {
    throw std::invalid_argument("strength outside [0,1]");
  }
  if (spec.strength == 0.0) return image;

  namespace k = detail_kernels;
  using namespace faultforge::scenario;
  const double s = spec.strength;
  const std::uint64_t seed = spec.seed;

  switch (spec.category.id()) {
    case kFog.id():
      return k::finalize(k::fog(image, s));
    case kDustStorm.id():
      return k::finalize(k::dust_storm(image, s));
    case kFrostCoating.id():
      return k::finalize(k::frost_coating(image, s, seed));
    case kRain.id():
      return k::finalize(k::rain(image, s, seed));
    case kLensDistortion.id(): {
      const auto warped =
          k::radial_warp(image, kDefaults.lens_coeff * s);
      const int d = static_cast<int>(
          std::llround(kDefaults.lens_chroma_px * s));
      return k::finalize(k::chromatic_shift(warped, d));
    }
    case kBarrelDistortion.id():
      return k::finalize(k::radial_warp(image, kDefaults.barrel_coeff * s));
    case kFishEye.id():
      return k::finalize(k::radial_warp(image, kDefaults.fisheye_coeff * s));
    case kLensVignetting.id():
      return k::finalize(k::lens_vignetting(image, s));
    case kChromaticAberration.id(): {
      const int d = static_cast<int>(
          std::llround(kDefaults.chroma_shift_px * s));
      return k::finalize(k::chromatic_shift(k::to_real(image), d));
    }
    case kDeadPixels.id():
      return k::finalize(k::dead_pixels(image, s, seed));
    case kCameraFailure.id():
      return k::finalize(k::camera_failure(image, s, seed));
    case kCameraBanding.id():
      return k::finalize(k::camera_banding(image, s, seed));
    case kSensorHeat.id():
      return k::finalize(k::sensor_heat(image, s, seed));
    case kHwOverheat.id():
      return k::finalize(k::hw_overheat(image, s, seed));
    case kMotionBlur.id():
      return k::finalize(k::motion_blur(image, s));
    case kCameraShake.id():
      return k::finalize(k::camera_shake(image, s, seed));
    case kCameraYaw.id():
      return k::finalize(k::camera_yaw(image, s));
    case kPerspectiveDistortion.id():
      return k::finalize(k::perspective(image, s));
    case kGlareOcclusion.id():
      return k::finalize(k::glare(image, s, seed, false, true));
    case kLowLightTunnel.id():
      return k::finalize(k::low_light_tunnel(image, s, seed));
    case kBrightReflection.id():
      return k::finalize(k::glare(image, s, seed, true, false));
    case kColorShiftNight.id():
      return k::finalize(k::color_shift_night(image, s));
    default:
      throw std::invalid_argument("unknown fault category id " +
                                  std::to_string(spec.category.id()));
  }
}

[[nodiscard]] inline ImageBuffer apply_fault(
    const ImageBuffer& image, const scenario::FaultScenario& scn) {
  return apply_fault(image,
                     DegradationSpec{scn.category, scn.strength, scn.seed});
}

/// Mean absolute per-channel difference scaled to [0,1].
[[nodiscard]] inline double degradation_magnitude(const ImageBuffer& original,
                                                  const ImageBuffer& degraded) {
  if (original.width != degraded.width ||
      original.height != degraded.height) {
    throw DimensionMismatchError(
        "degradation_magnitude requires equal dimensions");
  }
  if (!original.valid() || !degraded.valid()) {
    throw DimensionMismatchError("malformed image buffer");
  }
  if (original.pixels.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < original.pixels.size(); ++i) {
    sum += std::abs(static_cast<double>(original.pixels[i]) -
                    static_cast<double>(degraded.pixels[i]));
  }
  return sum / (255.0 * static_cast<double>(original.pixels.size()));
}

}  // namespace faultforge::degrade
