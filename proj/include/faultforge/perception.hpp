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
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "faultforge/detail/rng.hpp"
#include "faultforge/detail/strings.hpp"
#include "faultforge/error.hpp"
#include "faultforge/image.hpp"

namespace faultforge::perception {

/// Normalized image coordinates; pixel form is (x*width, y*height).
struct LanePoint {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const LanePoint&) const = default;
};

/// One evaluation sample. `group` is the fault folder the frame came from.
struct PredictionRecord {
  std::string image_id;
  std::string group;
  LanePoint truth;
  LanePoint prediction;

  bool operator==(const PredictionRecord&) const = default;
};

/// Returned when fewer than kMinLanePixels pixels pass the luma threshold;
/// matches the synthetic track's prior geometry.
inline constexpr LanePoint kFallbackPoint{0.5, 0.75};
inline constexpr int kMinLanePixels = 10;

/// Classical lane-center estimator: luma-threshold the bottom half of the
/// frame at mean + 1 sigma and return the intensity-weighted centroid,
/// normalized by (width, height). The relative threshold survives global
/// brightness faults better than a fixed luma cut.
[[nodiscard]] inline LanePoint estimate_lane_center(const ImageBuffer& img) {
  require_supported_size(img);

  const int y_begin = img.height / 2;
  const auto luma_of = [&](int x, int y) {
    return 0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) +
           0.114 * img.at(x, y, 2);
  };

  double sum = 0.0;
  double sum_sq = 0.0;
  const double count =
      static_cast<double>(img.width) * (img.height - y_begin);
  for (int y = y_begin; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const double l = luma_of(x, y);
      sum += l;
      sum_sq += l * l;
    }
  }
  const double mean = sum / count;
  const double variance = std::max(0.0, sum_sq / count - mean * mean);
  const double threshold = mean + 1.0 * std::sqrt(variance);

  double weight = 0.0;
  double wx = 0.0;
  double wy = 0.0;
  std::size_t passed = 0;
  for (int y = y_begin; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const double l = luma_of(x, y);
      if (l > threshold) {
        weight += l;
        wx += l * x;
        wy += l * y;
        ++passed;
      }
    }
  }
  if (passed < kMinLanePixels || weight <= 0.0) return kFallbackPoint;
  return LanePoint{wx / weight / img.width, wy / weight / img.height};
}

/// Track fixtures are 224x224 dark road with one bright lane-marking dash,
/// 9 px wide and kStripeRows tall, centered at row 168 so the dash center is
/// the exact ground truth (x uniform in [0.2, 0.8], y fixed at
/// 0.75 = 168/224).
inline constexpr int kStripeRows = 15;

/// Frame `index` of the fixture stream for `master_seed`. Pure, so callers
/// can stream arbitrarily large sets one frame at a time.
[[nodiscard]] inline std::pair<ImageBuffer, LanePoint> synthetic_track_frame(
    std::size_t index, std::uint64_t master_seed) {
  constexpr int kEdge = kDefaultImageEdge;
  constexpr double kRoadValue = 40.0;
  constexpr double kStripeValue = 230.0;
  constexpr double kStripeWidth = 9.0;
  constexpr double kNoiseSigma = 4.0;
  constexpr int kTruthRow = 168;
  constexpr int kRowBegin = kTruthRow - kStripeRows / 2;
  constexpr int kRowEnd = kTruthRow + kStripeRows / 2;  // inclusive

  const std::uint64_t seed = faultforge::detail::substream(master_seed, index);
  const double x_norm = 0.2 + 0.6 * faultforge::detail::uniform_at(seed, 0);
  const double center_px = x_norm * kEdge;

  ImageBuffer img(kEdge, kEdge);
  const std::uint64_t noise_seed = faultforge::detail::substream(seed, 1);
  std::uint64_t counter = 0;
  for (int y = 0; y < kEdge; ++y) {
    const bool stripe_row = y >= kRowBegin && y <= kRowEnd;
    for (int x = 0; x < kEdge; ++x) {
      // Column x covers [x, x+1); the dash covers center +- width/2.
      const double overlap =
          stripe_row
              ? std::clamp(std::min(x + 1.0, center_px + kStripeWidth / 2.0) -
                               std::max(static_cast<double>(x),
                                        center_px - kStripeWidth / 2.0),
                           0.0, 1.0)
              : 0.0;
      const double value =
          kRoadValue + (kStripeValue - kRoadValue) * overlap +
          kNoiseSigma * faultforge::detail::gaussian_at(noise_seed, counter++);
      const auto byte = static_cast<std::uint8_t>(
          std::nearbyint(std::clamp(value, 0.0, 255.0)));
      img.at(x, y, 0) = byte;
      img.at(x, y, 1) = byte;
      img.at(x, y, 2) = byte;
    }
  }
  return {std::move(img), LanePoint{x_norm, 0.75}};
}

/// Deterministic batch form of synthetic_track_frame.
[[nodiscard]] inline std::vector<std::pair<ImageBuffer, LanePoint>>
gen_synthetic_track(std::size_t count, std::uint64_t master_seed) {
  if (count < 1) throw std::invalid_argument("count must be >= 1");
  std::vector<std::pair<ImageBuffer, LanePoint>> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(synthetic_track_frame(i, master_seed));
  }
  return out;
}

namespace detail_predictions {

inline double coord_field(const nlohmann::json& obj, const char* key,
                          std::size_t line_no) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw SchemaError(line_no, std::string("missing field '") + key + "'");
  }
  if (!it->is_number()) {
    throw SchemaError(line_no, std::string(key) + " must be a number");
  }
  const double v = it->get<double>();
  if (!(v >= 0.0 && v <= 1.0)) {
    throw SchemaError(line_no, std::string(key) + " outside [0,1]: " +
                                   faultforge::detail::format_double(v));
  }
  return v;
}

}  // namespace detail_predictions

/// Prediction JSONL: one record per line with keys image_id, group, gt_x,
/// gt_y, pred_x, pred_y. All coordinates validated to [0,1].
[[nodiscard]] inline std::vector<PredictionRecord> read_predictions(
    std::span<const std::uint8_t> bytes) {
  const std::string_view text(reinterpret_cast<const char*>(bytes.data()),
                              bytes.size());
  if (!faultforge::detail::utf8_valid(text)) {
    throw DecodeError("prediction file is not valid UTF-8");
  }

  std::vector<PredictionRecord> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    const auto line = faultforge::detail::trim(text.substr(pos, end - pos));
    pos = end + 1;
    if (line.empty() || line.front() == '#') continue;

    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) throw SchemaError(line_no, "expected a JSON object");

    PredictionRecord r;
    const auto id = obj.find("image_id");
    if (id == obj.end() || !id->is_string()) {
      throw SchemaError(line_no, "missing or non-string image_id");
    }
    r.image_id = id->get<std::string>();
    const auto group = obj.find("group");
    if (group == obj.end() || !group->is_string()) {
      throw SchemaError(line_no, "missing or non-string group");
    }
    r.group = group->get<std::string>();
    if (r.group.empty()) throw SchemaError(line_no, "group must be nonempty");

    r.truth.x = detail_predictions::coord_field(obj, "gt_x", line_no);
    r.truth.y = detail_predictions::coord_field(obj, "gt_y", line_no);
    r.prediction.x = detail_predictions::coord_field(obj, "pred_x", line_no);
    r.prediction.y = detail_predictions::coord_field(obj, "pred_y", line_no);
    out.push_back(std::move(r));
  }
  return out;
}

[[nodiscard]] inline std::vector<std::uint8_t> write_predictions(
    std::span<const PredictionRecord> records) {
  std::string out;
  for (const auto& r : records) {
    nlohmann::json obj;
    obj["image_id"] = r.image_id;
    obj["group"] = r.group;
    obj["gt_x"] = r.truth.x;
    obj["gt_y"] = r.truth.y;
    obj["pred_x"] = r.prediction.x;
    obj["pred_y"] = r.prediction.y;
    out += obj.dump();
    out += '\n';
  }
  return std::vector<std::uint8_t>(out.begin(), out.end());
}

}  // namespace faultforge::perception
