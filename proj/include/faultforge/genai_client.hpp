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

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "faultforge/degrade.hpp"
#include "faultforge/detail/base64.hpp"
#include "faultforge/error.hpp"
#include "faultforge/image.hpp"
#include "faultforge/image_io.hpp"
#include "faultforge/scenario.hpp"

namespace faultforge::genai {

/// Offline-phase model backends are reached over HTTP; these env vars carry
/// the endpoints and the shared bearer token.
inline constexpr const char* kEnvLlmUrl = "FAULTFORGE_LLM_URL";
inline constexpr const char* kEnvLdmUrl = "FAULTFORGE_LDM_URL";
inline constexpr const char* kEnvClipUrl = "FAULTFORGE_CLIP_URL";
inline constexpr const char* kEnvToken = "FAULTFORGE_TOKEN";

/// Default similarity threshold for the fidelity gate. A configuration
/// default only; pipeline behavior must not assume this value.
inline constexpr double kDefaultGateThreshold = 0.25;

/// Stub calibration: expected degradation magnitude for a given strength.
inline constexpr double kStubExpectedMagnitudeSlope = 0.4;

inline constexpr std::string_view kSynthesizePath = "/v1/synthesize";
inline constexpr std::string_view kScorePath = "/v1/score";

struct BackendEndpoint {
  std::string base_url;
  std::optional<std::string> auth_token;
  std::chrono::milliseconds timeout{5000};
  int max_retries = 2;  // at most 5
  std::chrono::milliseconds backoff_base{250};
};

struct FidelityScore {
  std::string scenario_id;
  double score = 0.0;
  double threshold = 0.0;
  bool accepted = false;

  bool operator==(const FidelityScore&) const = default;
};

struct GateResult {
  std::vector<FidelityScore> accepted;
  std::vector<FidelityScore> rejected;
};

/// Order-stable partition: accepted iff score >= threshold (non-strict, so a
/// score exactly at the threshold passes).
[[nodiscard]] inline GateResult gate(
    std::span<const std::pair<std::string, double>> scores, double threshold) {
  if (!(threshold >= -1.0 && threshold <= 1.0)) {
    throw std::invalid_argument("gate threshold outside [-1,1]");
  }
  GateResult result;
  for (const auto& [id, score] : scores) {
    FidelityScore record{id, score, threshold, score >= threshold};
    (record.accepted ? result.accepted : result.rejected)
        .push_back(std::move(record));
  }
  return result;
}

namespace detail_client {

inline void validate_endpoint(const BackendEndpoint& ep) {
  if (ep.base_url.empty()) {
    throw std::invalid_argument("endpoint base_url must be nonempty");
  }
  if (ep.timeout.count() <= 0) {
    throw std::invalid_argument("endpoint timeout must be positive");
  }
  if (ep.max_retries < 0 || ep.max_retries > 5) {
    throw std::invalid_argument("max_retries must be in [0,5]");
  }
}

/// POST with exponential backoff (backoff_base * 2^k before retry k).
/// Transport failures and 5xx responses are retried; other non-200 statuses
/// raise BackendError immediately.
[[nodiscard]] inline nlohmann::json post_json(const BackendEndpoint& ep,
                                              std::string_view path,
                                              const nlohmann::json& body) {
  const std::string payload = body.dump();
  std::string last_error = "no attempt made";

  for (int attempt = 0; attempt <= ep.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(ep.backoff_base * (1 << (attempt - 1)));
    }
    httplib::Client client(ep.base_url);
    client.set_connection_timeout(ep.timeout);
    client.set_read_timeout(ep.timeout);
    client.set_write_timeout(ep.timeout);
    httplib::Headers headers;
    if (ep.auth_token) {
      headers.emplace("Authorization", "Bearer " + *ep.auth_token);
    }

    auto res = client.Post(std::string(path), headers, payload,
                           "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_error = "status " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw BackendError(res->status, res->body.substr(0, 200));
    }
    try {
      return nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
      throw DecodeError(std::string("backend returned invalid JSON: ") +
                        e.what());
    }
  }
  throw TransportError(std::string(path) + ": retries exhausted (" +
                       last_error + ")");
}

}  // namespace detail_client

/// Image-synthesis backend interface (the LDM in the offline pipeline).
class SynthesisClient {
 public:
  virtual ~SynthesisClient() = default;

  /// Returns the degraded variant of `base` for the scenario; same
  /// dimensions as the input.
  [[nodiscard]] virtual ImageBuffer synth_image(
      const ImageBuffer& base, const scenario::FaultScenario& scn) const = 0;
};

/// Local stand-in: procedural degradation with the scenario's own
/// (category, strength, seed). Byte-identical to degrade::apply_fault.
class StubSynthesisClient final : public SynthesisClient {
 public:
  [[nodiscard]] ImageBuffer synth_image(
      const ImageBuffer& base,
      const scenario::FaultScenario& scn) const override {
    return degrade::apply_fault(base, scn);
  }
};

class RemoteSynthesisClient final : public SynthesisClient {
 public:
  explicit RemoteSynthesisClient(BackendEndpoint endpoint)
      : endpoint_(std::move(endpoint)) {
    detail_client::validate_endpoint(endpoint_);
  }

  [[nodiscard]] ImageBuffer synth_image(
      const ImageBuffer& base,
      const scenario::FaultScenario& scn) const override {
    require_supported_size(base);
    nlohmann::json body;
    body["image_b64"] = detail::base64_encode(io::encode_png(base));
    body["prompt"] = scn.description;
    body["strength"] = scn.strength;
    const auto reply =
        detail_client::post_json(endpoint_, kSynthesizePath, body);
    const auto it = reply.find("image_b64");
    if (it == reply.end() || !it->is_string()) {
      throw DecodeError("synthesize reply missing image_b64");
    }
    ImageBuffer img =
        io::decode_png(detail::base64_decode(it->get<std::string>()));
    if (img.width != base.width || img.height != base.height) {
      throw DecodeError("backend image dimensions do not match the base");
    }
    return img;
  }

 private:
  BackendEndpoint endpoint_;
};

/// Semantic-fidelity scorer interface (the CLIP-style model). Scores are
/// cosine-like similarities in [-1,1].
class FidelityScorer {
 public:
  virtual ~FidelityScorer() = default;

  [[nodiscard]] virtual double score(const ImageBuffer& image,
                                     const std::string& description,
                                     std::string_view image_id = {}) const = 0;
};

/// Local proxy scorer. For a registered image id, the score is
/// 1 - |expected_magnitude(strength) - observed_magnitude| with
/// expected_magnitude(s) = kStubExpectedMagnitudeSlope * s; unregistered ids
/// score 0. Registration happens at setup; scoring is pure.
class StubFidelityScorer final : public FidelityScorer {
 public:
  void register_base(std::string image_id, ImageBuffer base,
                     double strength) {
    bases_.insert_or_assign(std::move(image_id),
                            BaseRecord{std::move(base), strength});
  }

  [[nodiscard]] double score(const ImageBuffer& image,
                             const std::string& description,
                             std::string_view image_id = {}) const override {
    if (description.empty()) {
      throw std::invalid_argument("description must be nonempty");
    }
    const auto it = bases_.find(std::string(image_id));
    if (it == bases_.end()) return 0.0;
    const double expected =
        kStubExpectedMagnitudeSlope * it->second.strength;
    const double observed =
        degrade::degradation_magnitude(it->second.image, image);
    return 1.0 - std::abs(expected - observed);
  }

 private:
  struct BaseRecord {
    ImageBuffer image;
    double strength;
  };
  std::unordered_map<std::string, BaseRecord> bases_;
};

class RemoteFidelityScorer final : public FidelityScorer {
 public:
  explicit RemoteFidelityScorer(BackendEndpoint endpoint)
      : endpoint_(std::move(endpoint)) {
    detail_client::validate_endpoint(endpoint_);
  }

  [[nodiscard]] double score(const ImageBuffer& image,
                             const std::string& description,
                             std::string_view /*image_id*/ = {}) const override {
    if (description.empty()) {
      throw std::invalid_argument("description must be nonempty");
    }
    require_supported_size(image);
    nlohmann::json body;
    body["image_b64"] = detail::base64_encode(io::encode_png(image));
    body["text"] = description;
    const auto reply = detail_client::post_json(endpoint_, kScorePath, body);
    const auto it = reply.find("score");
    if (it == reply.end() || !it->is_number()) {
      throw DecodeError("score reply missing numeric score");
    }
    const double value = it->get<double>();
    if (!(value >= -1.0 && value <= 1.0)) {
      throw DecodeError("score outside [-1,1]");
    }
    return value;
  }

 private:
  BackendEndpoint endpoint_;
};

}  // namespace faultforge::genai
