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

#include "faultforge/degrade.hpp"

#include <set>

#include <catch2/catch_amalgamated.hpp>

#include "faultforge/image_io.hpp"
#include "support.hpp"

using namespace faultforge;
using namespace faultforge::degrade;
using faultforge::scenario::all_categories;

namespace {

ImageBuffer gray(int w = 64, int h = 64, std::uint8_t v = 100) {
  return ImageBuffer::filled(w, h, {v, v, v});
}

}  // namespace

TEST_CASE("strength zero is the identity for every category") {
  const auto probe = testsupport::probe_set(4);
  for (const auto cat : all_categories()) {
    for (const auto& img : probe) {
      const auto out = apply_fault(img, {cat, 0.0, 1234});
      REQUIRE(out == img);
    }
  }
}

TEST_CASE("equal inputs give byte-identical outputs") {
  const auto probe = testsupport::probe_set(2);
  for (const auto cat : all_categories()) {
    const auto a = apply_fault(probe[1], {cat, 0.7, 99});
    const auto b = apply_fault(probe[1], {cat, 0.7, 99});
    REQUIRE(a == b);
    CHECK(a.width == probe[1].width);
    CHECK(a.height == probe[1].height);
  }
}

TEST_CASE("different seeds move seeded kernels") {
  const auto img = testsupport::probe_set(2)[1];
  const auto a = apply_fault(img, {scenario::kDeadPixels, 0.5, 1});
  const auto b = apply_fault(img, {scenario::kDeadPixels, 0.5, 2});
  CHECK(a != b);
}

TEST_CASE("undersized images are rejected") {
  const auto img = gray(7, 64);
  CHECK_THROWS_AS(apply_fault(img, {scenario::kFog, 0.5, 1}),
                  UnsupportedSizeError);
  CHECK_THROWS_AS(apply_fault(gray(64, 7), {scenario::kFog, 0.5, 1}),
                  UnsupportedSizeError);
  CHECK_NOTHROW(apply_fault(gray(8, 8), {scenario::kFog, 0.5, 1}));
}

TEST_CASE("out-of-range strength is a precondition violation") {
  CHECK_THROWS_AS(apply_fault(gray(), {scenario::kFog, 1.5, 1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(apply_fault(gray(), {scenario::kFog, -0.1, 1}),
                  std::invalid_argument);
}

TEST_CASE("fog blends toward the tint, heavier at the top") {
  const auto img = gray(224, 224);
  const auto out = apply_fault(img, {scenario::kFog, 1.0, 5});
  // Top row alpha is exactly 1, so pixels become the tint.
  for (int x = 0; x < out.width; x += 17) {
    CHECK(out.at(x, 0, 0) == 200);
    CHECK(out.at(x, 0, 1) == 200);
    CHECK(out.at(x, 0, 2) == 200);
  }
  // Bottom row keeps more of the input.
  CHECK(out.at(0, 223, 0) < 200);
  CHECK(out.at(0, 223, 0) > 100);
}

TEST_CASE("dust storm applies a uniform tinted blend") {
  const auto img = gray(32, 32, 0);
  const auto out = apply_fault(img, {scenario::kDustStorm, 1.0, 5});
  // alpha = 0.8, tint (180,150,110) over black: 144, 120, 88.
  CHECK(out.at(16, 16, 0) == 144);
  CHECK(out.at(16, 16, 1) == 120);
  CHECK(out.at(16, 16, 2) == 88);
}

TEST_CASE("dead pixels kill exactly floor(0.05*s*w*h) unique pixels") {
  const auto white = ImageBuffer::filled(224, 224, {255, 255, 255});
  const auto out = apply_fault(white, {scenario::kDeadPixels, 1.0, 3});
  std::size_t black = 0;
  for (std::size_t i = 0; i < out.pixels.size(); i += 3) {
    if (out.pixels[i] == 0 && out.pixels[i + 1] == 0 && out.pixels[i + 2] == 0) {
      ++black;
    }
  }
  CHECK(black == 2508);  // floor(0.05 * 224 * 224)

  const auto half = apply_fault(white, {scenario::kDeadPixels, 0.5, 3});
  std::size_t black_half = 0;
  for (std::size_t i = 0; i < half.pixels.size(); i += 3) {
    if (half.pixels[i] == 0) ++black_half;
  }
  CHECK(black_half == 1254);  // floor(0.025 * 224 * 224)
}

TEST_CASE("vignetting keeps black images black and darkens corners") {
  const auto black = ImageBuffer::filled(64, 64, {0, 0, 0});
  CHECK(apply_fault(black, {scenario::kLensVignetting, 1.0, 1}) == black);

  const auto img = gray(64, 64, 200);
  const auto out = apply_fault(img, {scenario::kLensVignetting, 1.0, 1});
  CHECK(out.at(0, 0, 0) < out.at(32, 32, 0));
  CHECK(out.at(32, 32, 0) >= 198);  // center nearly untouched
}

TEST_CASE("chromatic aberration shifts red and blue in opposite directions") {
  ImageBuffer img = ImageBuffer::filled(64, 64, {0, 0, 0});
  for (int y = 0; y < 64; ++y) {
    img.at(30, y, 0) = 255;
    img.at(30, y, 2) = 255;
  }
  // d = round(5 * 1.0) = 5.
  const auto out = apply_fault(img, {scenario::kChromaticAberration, 1.0, 1});
  CHECK(out.at(35, 10, 0) == 255);  // red moved +5
  CHECK(out.at(30, 10, 0) == 0);
  CHECK(out.at(25, 10, 2) == 255);  // blue moved -5
  CHECK(out.at(30, 10, 2) == 0);
}

TEST_CASE("motion blur averages along the row") {
  ImageBuffer img = ImageBuffer::filled(64, 64, {0, 0, 0});
  for (int y = 0; y < 64; ++y) img.at(32, y, 1) = 255;
  // s=1 -> kernel length 15; a one-pixel line spreads to 255/15 = 17.
  const auto out = apply_fault(img, {scenario::kMotionBlur, 1.0, 1});
  CHECK(out.at(32, 32, 1) == 17);
  CHECK(out.at(32 + 7, 32, 1) == 17);
  CHECK(out.at(32 + 8, 32, 1) == 0);
}

TEST_CASE("camera failure blacks a band below 0.9 and goes to noise at 0.9") {
  const auto white = ImageBuffer::filled(64, 64, {255, 255, 255});
  const auto banded = apply_fault(white, {scenario::kCameraFailure, 0.5, 7});
  std::size_t black_rows = 0;
  for (int y = 0; y < 64; ++y) {
    if (banded.at(0, y, 0) == 0 && banded.at(32, y, 0) == 0) ++black_rows;
  }
  CHECK(black_rows == 16);  // round(0.5 * 64 * 0.5)

  const auto noisy = apply_fault(white, {scenario::kCameraFailure, 0.95, 7});
  std::set<std::uint8_t> values(noisy.pixels.begin(), noisy.pixels.end());
  CHECK(values.size() > 100);  // full-frame uniform noise
}

TEST_CASE("hw overheat freezes a band to the row above it") {
  // Zero strength-noise interference: compare band rows to the row above.
  const auto probe = testsupport::probe_set(2)[1];
  const auto out = apply_fault(probe, {scenario::kHwOverheat, 1.0, 21});
  // band = round(0.2 * 224) = 45 rows; find it by scanning for repeats.
  int longest_run = 0;
  int run = 0;
  for (int y = 1; y < out.height; ++y) {
    bool same = true;
    for (int x = 0; x < out.width && same; ++x) {
      for (int c = 0; c < 3; ++c) {
        if (out.at(x, y, c) != out.at(x, y - 1, c)) {
          same = false;
          break;
        }
      }
    }
    run = same ? run + 1 : 0;
    longest_run = std::max(longest_run, run);
  }
  CHECK(longest_run >= 44);
}

TEST_CASE("degradation magnitude endpoints") {
  const auto img = testsupport::probe_set(2)[0];
  CHECK(degradation_magnitude(img, img) == 0.0);

  const auto black = ImageBuffer::filled(16, 16, {0, 0, 0});
  const auto white = ImageBuffer::filled(16, 16, {255, 255, 255});
  CHECK(degradation_magnitude(black, white) == 1.0);

  CHECK_THROWS_AS(degradation_magnitude(black, ImageBuffer::filled(8, 16, {0, 0, 0})),
                  DimensionMismatchError);
}

TEST_CASE("fog magnitude example: gray 100 at full strength") {
  const auto img = gray(224, 224, 100);
  const auto out = apply_fault(img, {scenario::kFog, 1.0, 5});
  // Top row blends fully to (200,200,200): per-pixel delta 100.
  double top_mag = 0;
  for (int x = 0; x < 224; ++x) {
    for (int c = 0; c < 3; ++c) {
      top_mag += std::abs(out.at(x, 0, c) - 100.0);
    }
  }
  CHECK(top_mag / (224 * 3) == Catch::Approx(100.0));
}

TEST_CASE("per-category magnitude is monotone on the probe set") {
  // Spot check on a reduced grid; the acceptance suite runs the full sweep.
  const auto probe = testsupport::probe_set(8);
  for (const auto cat : all_categories()) {
    double prev = -1.0;
    for (const double s : {0.0, 0.5, 1.0}) {
      double mean = 0.0;
      for (std::size_t i = 0; i < probe.size(); ++i) {
        const auto out = apply_fault(probe[i], {cat, s, 4242 + i});
        mean += degradation_magnitude(probe[i], out);
      }
      mean /= static_cast<double>(probe.size());
      INFO("category " << cat.name() << " strength " << s);
      REQUIRE(mean >= prev);
      prev = mean;
    }
  }
}

TEST_CASE("png and raw rgb round trips") {
  const auto img = testsupport::probe_set(2)[1];

  SECTION("png") {
    const auto png = io::encode_png(img);
    CHECK(io::decode_png(std::span(png.data(), png.size())) == img);
  }

  SECTION("png encoding is deterministic") {
    CHECK(io::encode_png(img) == io::encode_png(img));
  }

  SECTION("garbage bytes fail to decode") {
    const std::vector<std::uint8_t> junk(64, 0xAB);
    CHECK_THROWS_AS(io::decode_png(std::span(junk.data(), junk.size())),
                    DecodeError);
  }

  SECTION("raw rgb") {
    const auto dump = io::write_rgb(img);
    CHECK(dump.size() == 8 + img.pixels.size());
    CHECK(io::read_rgb(std::span(dump.data(), dump.size())) == img);
  }

  SECTION("truncated rgb dump is rejected") {
    auto dump = io::write_rgb(img);
    dump.pop_back();
    CHECK_THROWS_AS(io::read_rgb(std::span(dump.data(), dump.size())),
                    TruncationError);
  }
}
