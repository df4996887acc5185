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
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "faultforge/detail/rng.hpp"
#include "faultforge/detail/strings.hpp"
#include "faultforge/error.hpp"

namespace faultforge::scenario {

/// Fault taxonomy. Ids are dense, 0-based and stable; the name <-> id
/// mapping is a bijection.
inline constexpr std::array<std::string_view, 22> kCategoryNames = {
    "FOG",
    "DUST_STORM",
    "FROST_COATING",
    "RAIN",
    "LENS_DISTORTION",
    "BARREL_DISTORTION",
    "FISH_EYE",
    "LENS_VIGNETTING",
    "CHROMATIC_ABERRATION",
    "DEAD_PIXELS",
    "CAMERA_FAILURE",
    "CAMERA_BANDING",
    "SENSOR_HEAT",
    "HW_OVERHEAT",
    "MOTION_BLUR",
    "CAMERA_SHAKE",
    "CAMERA_YAW",
    "PERSPECTIVE_DISTORTION",
    "GLARE_OCCLUSION",
    "LOW_LIGHT_TUNNEL",
    "BRIGHT_REFLECTION",
    "COLOR_SHIFT_NIGHT",
};

inline constexpr std::size_t kCategoryCount = kCategoryNames.size();

class FaultCategory {
 public:
  constexpr FaultCategory() = default;

  [[nodiscard]] constexpr std::uint16_t id() const noexcept { return id_; }
  [[nodiscard]] constexpr std::string_view name() const noexcept {
    return kCategoryNames[id_];
  }

  [[nodiscard]] static constexpr std::optional<FaultCategory> from_id(
      std::uint16_t id) noexcept {
    if (id >= kCategoryCount) return std::nullopt;
    return FaultCategory(id);
  }

  [[nodiscard]] static constexpr std::optional<FaultCategory> from_name(
      std::string_view name) noexcept {
    for (std::size_t i = 0; i < kCategoryCount; ++i) {
      if (kCategoryNames[i] == name) {
        return FaultCategory(static_cast<std::uint16_t>(i));
      }
    }
    return std::nullopt;
  }

  constexpr bool operator==(const FaultCategory&) const = default;
  constexpr auto operator<=>(const FaultCategory&) const = default;

 private:
  constexpr explicit FaultCategory(std::uint16_t id) : id_(id) {}
  std::uint16_t id_ = 0;
};

inline constexpr FaultCategory kFog = *FaultCategory::from_name("FOG");
inline constexpr FaultCategory kDustStorm =
    *FaultCategory::from_name("DUST_STORM");
inline constexpr FaultCategory kFrostCoating =
    *FaultCategory::from_name("FROST_COATING");
inline constexpr FaultCategory kRain = *FaultCategory::from_name("RAIN");
inline constexpr FaultCategory kLensDistortion =
    *FaultCategory::from_name("LENS_DISTORTION");
inline constexpr FaultCategory kBarrelDistortion =
    *FaultCategory::from_name("BARREL_DISTORTION");
inline constexpr FaultCategory kFishEye =
    *FaultCategory::from_name("FISH_EYE");
inline constexpr FaultCategory kLensVignetting =
    *FaultCategory::from_name("LENS_VIGNETTING");
inline constexpr FaultCategory kChromaticAberration =
    *FaultCategory::from_name("CHROMATIC_ABERRATION");
inline constexpr FaultCategory kDeadPixels =
    *FaultCategory::from_name("DEAD_PIXELS");
inline constexpr FaultCategory kCameraFailure =
    *FaultCategory::from_name("CAMERA_FAILURE");
inline constexpr FaultCategory kCameraBanding =
    *FaultCategory::from_name("CAMERA_BANDING");
inline constexpr FaultCategory kSensorHeat =
    *FaultCategory::from_name("SENSOR_HEAT");
inline constexpr FaultCategory kHwOverheat =
    *FaultCategory::from_name("HW_OVERHEAT");
inline constexpr FaultCategory kMotionBlur =
    *FaultCategory::from_name("MOTION_BLUR");
inline constexpr FaultCategory kCameraShake =
    *FaultCategory::from_name("CAMERA_SHAKE");
inline constexpr FaultCategory kCameraYaw =
    *FaultCategory::from_name("CAMERA_YAW");
inline constexpr FaultCategory kPerspectiveDistortion =
    *FaultCategory::from_name("PERSPECTIVE_DISTORTION");
inline constexpr FaultCategory kGlareOcclusion =
    *FaultCategory::from_name("GLARE_OCCLUSION");
inline constexpr FaultCategory kLowLightTunnel =
    *FaultCategory::from_name("LOW_LIGHT_TUNNEL");
inline constexpr FaultCategory kBrightReflection =
    *FaultCategory::from_name("BRIGHT_REFLECTION");
inline constexpr FaultCategory kColorShiftNight =
    *FaultCategory::from_name("COLOR_SHIFT_NIGHT");

[[nodiscard]] inline std::vector<FaultCategory> all_categories() {
  std::vector<FaultCategory> out;
  out.reserve(kCategoryCount);
  for (std::size_t i = 0; i < kCategoryCount; ++i) {
    out.push_back(*FaultCategory::from_id(static_cast<std::uint16_t>(i)));
  }
  return out;
}

/// One structured fault description. `strength` is the denoising-strength
/// analog in [0,1]; `description` is the text a generative backend would be
/// prompted with; `seed` pins all randomness downstream.
struct FaultScenario {
  std::string scenario_id;
  FaultCategory category;
  double strength = 0.0;
  std::string description;
  std::uint64_t seed = 0;

  bool operator==(const FaultScenario&) const = default;
};

enum class ScenarioFormat { jsonl, pipe_text };

/// Severity band labels over strength quartiles; used for generated
/// descriptions and scenario ids.
[[nodiscard]] inline std::string_view severity_band(double strength) noexcept {
  if (strength < 0.25) return "SLIGHT";
  if (strength < 0.5) return "MODERATE";
  if (strength < 0.75) return "HEAVY";
  return "SEVERE";
}

namespace detail_scenario {

inline void validate(FaultScenario& s, std::size_t line_no) {
  if (s.scenario_id.empty()) {
    throw SchemaError(line_no, "scenario_id must be nonempty");
  }
  if (s.description.empty()) {
    throw SchemaError(line_no, "description must be nonempty");
  }
  if (!(s.strength >= 0.0 && s.strength <= 1.0)) {
    throw SchemaError(line_no,
                      "strength outside [0,1]: " +
                          faultforge::detail::format_double(s.strength));
  }
}

inline FaultScenario parse_jsonl_line(std::string_view line,
                                      std::size_t line_no) {
  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(line_no, std::string("invalid JSON: ") + e.what());
  }
  if (!obj.is_object()) throw SchemaError(line_no, "expected a JSON object");

  const auto need = [&](const char* key) -> const nlohmann::json& {
    const auto it = obj.find(key);
    if (it == obj.end()) {
      throw SchemaError(line_no, std::string("missing field '") + key + "'");
    }
    return *it;
  };

  FaultScenario s;
  const auto& cat = need("category");
  if (!cat.is_string()) throw SchemaError(line_no, "category must be a string");
  const auto category = FaultCategory::from_name(cat.get<std::string>());
  if (!category) {
    throw SchemaError(line_no,
                      "unknown category '" + cat.get<std::string>() + "'");
  }
  s.category = *category;

  const auto& strength = need("strength");
  if (!strength.is_number()) {
    throw SchemaError(line_no, "strength must be a number");
  }
  s.strength = strength.get<double>();

  const auto& id = need("scenario_id");
  if (!id.is_string()) throw SchemaError(line_no, "scenario_id must be a string");
  s.scenario_id = id.get<std::string>();

  const auto& desc = need("description");
  if (!desc.is_string()) throw SchemaError(line_no, "description must be a string");
  s.description = desc.get<std::string>();

  const auto& seed = need("seed");
  if (!seed.is_number_unsigned()) {
    throw SchemaError(line_no, "seed must be an unsigned integer");
  }
  s.seed = seed.get<std::uint64_t>();

  validate(s, line_no);
  return s;
}

// `NAME | strength | description | seed`
inline FaultScenario parse_pipe_line(std::string_view line,
                                     std::size_t line_no) {
  const auto fields = faultforge::detail::split(line, '|');
  if (fields.size() != 4) {
    throw SchemaError(line_no, "expected 4 pipe-separated fields, got " +
                                   std::to_string(fields.size()));
  }
  FaultScenario s;
  const auto name = faultforge::detail::trim(fields[0]);
  const auto category = FaultCategory::from_name(name);
  if (!category) {
    throw SchemaError(line_no, "unknown category '" + std::string(name) + "'");
  }
  s.category = *category;

  const auto strength = faultforge::detail::parse_double(fields[1]);
  if (!strength) throw SchemaError(line_no, "strength is not a number");
  s.strength = *strength;

  s.description = std::string(faultforge::detail::trim(fields[2]));

  const auto seed = faultforge::detail::parse_u64(fields[3]);
  if (!seed) throw SchemaError(line_no, "seed is not an unsigned integer");
  s.seed = *seed;

  char id_buf[32];
  std::snprintf(id_buf, sizeof(id_buf), "L%06zu", line_no);
  s.scenario_id = id_buf;

  validate(s, line_no);
  return s;
}

}  // namespace detail_scenario

/// Parses a scenario file. Blank lines and lines starting with '#' are
/// skipped; every other line must be one scenario. Out-of-range strengths
/// are rejected, never clamped.
[[nodiscard]] inline std::vector<FaultScenario> parse_scenario_file(
    std::span<const std::uint8_t> bytes, ScenarioFormat format) {
  const std::string_view text(reinterpret_cast<const char*>(bytes.data()),
                              bytes.size());
  if (!faultforge::detail::utf8_valid(text)) {
    throw DecodeError("scenario file is not valid UTF-8");
  }

  std::vector<FaultScenario> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    const auto line = faultforge::detail::trim(text.substr(pos, end - pos));
    pos = end + 1;
    if (line.empty() || line.front() == '#') continue;
    out.push_back(format == ScenarioFormat::jsonl
                      ? detail_scenario::parse_jsonl_line(line, line_no)
                      : detail_scenario::parse_pipe_line(line, line_no));
  }
  return out;
}

[[nodiscard]] inline std::vector<FaultScenario> parse_scenario_file(
    std::string_view text, ScenarioFormat format) {
  return parse_scenario_file(
      std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                text.size()),
      format);
}

/// Deterministic local stand-in for an LLM scenario generator. Strengths are
/// the low-discrepancy sequence fract((k+1) * phi^-1), which covers [0,1)
/// with near-uniform gaps; seeds come from a splittable hash of
/// (master_seed, k).
[[nodiscard]] inline std::vector<FaultScenario> generate_scenarios(
    FaultCategory category, std::size_t count, std::uint64_t master_seed) {
  if (count < 1) throw std::invalid_argument("count must be >= 1");
  constexpr double kInversePhi = 0.6180339887;

  std::vector<FaultScenario> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double x = static_cast<double>(k + 1) * kInversePhi;
    const double strength = x - std::floor(x);

    FaultScenario s;
    s.category = category;
    s.strength = strength;
    s.seed = faultforge::detail::hash_at(master_seed, k);

    char id_buf[48];
    std::snprintf(id_buf, sizeof(id_buf), "%s_%03zu",
                  std::string(severity_band(strength)).c_str(), k);
    s.scenario_id = id_buf;

    std::string band = faultforge::detail::humanize_token(
        std::string(severity_band(strength)));
    band[0] = static_cast<char>(band[0] - 'a' + 'A');
    s.description = band + " " +
                    faultforge::detail::humanize_token(category.name()) +
                    " affecting the forward camera view";
    out.push_back(std::move(s));
  }
  return out;
}

/// Canonical JSONL emission: one object per line, keys sorted
/// (category, description, scenario_id, seed, strength), LF line endings,
/// trailing newline on the last line. parse(write(x)) == x.
[[nodiscard]] inline std::vector<std::uint8_t> write_scenario_file(
    std::span<const FaultScenario> scenarios) {
  if (scenarios.empty()) {
    throw EmptyInputError("cannot write an empty scenario list");
  }
  std::string out;
  for (const auto& s : scenarios) {
    nlohmann::json obj;
    obj["category"] = std::string(s.category.name());
    obj["description"] = s.description;
    obj["scenario_id"] = s.scenario_id;
    obj["seed"] = s.seed;
    obj["strength"] = s.strength;
    out += obj.dump();
    out += '\n';
  }
  return std::vector<std::uint8_t>(out.begin(), out.end());
}

}  // namespace faultforge::scenario
