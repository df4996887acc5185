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
#include <bit>
#include <chrono>
#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "faultforge/detail/crc32.hpp"
#include "faultforge/detail/rng.hpp"
#include "faultforge/detail/strings.hpp"
#include "faultforge/error.hpp"
#include "faultforge/metrics.hpp"
#include "faultforge/scenario.hpp"

namespace faultforge::lut {

inline constexpr std::uint16_t kFormatVersion = 1;
inline constexpr std::uint8_t kDefaultBucketCount = 10;
inline constexpr std::array<std::uint8_t, 4> kMagic{'F', 'L', 'U', 'T'};
inline constexpr std::size_t kHeaderBytes = 12;   // magic+version+buckets+rsvd+count
inline constexpr std::size_t kEntryBytes = 28;
inline constexpr std::size_t kChecksumBytes = 4;

enum class Risk : std::uint8_t { nominal = 0, degraded = 1, critical = 2 };

[[nodiscard]] constexpr std::string_view risk_name(Risk r) noexcept {
  switch (r) {
    case Risk::nominal:
      return "nominal";
    case Risk::degraded:
      return "degraded";
    case Risk::critical:
      return "critical";
  }
  return "unknown";
}

/// Alerting thresholds. Defaults are calibrated so a fault family with
/// within-0.10 near 0.31 or overall R^2 near 0.755 grades critical, and one
/// with within-0.10 near 0.445 and RMSE near 0.18 grades degraded.
struct RiskThresholds {
  double critical_within_010 = 0.35;
  double critical_r2 = 0.76;
  double degraded_within_010 = 0.50;
  double degraded_rmse = 0.15;
};

/// NaN metrics never satisfy a comparison, so a degenerate R^2 cannot by
/// itself grade an entry critical.
[[nodiscard]] inline Risk classify_risk(double within_010, double r2,
                                        double rmse,
                                        const RiskThresholds& t = {}) {
  if (within_010 < t.critical_within_010 || r2 < t.critical_r2) {
    return Risk::critical;
  }
  if (within_010 < t.degraded_within_010 || rmse > t.degraded_rmse) {
    return Risk::degraded;
  }
  return Risk::nominal;
}

struct LutKey {
  std::uint16_t category_id = 0;
  std::uint8_t bucket = 0;

  constexpr auto operator<=>(const LutKey&) const = default;
};

/// Severity bucket over strength in [0,1]: min(B-1, floor(strength*B)).
[[nodiscard]] inline std::uint8_t bucket_of(double strength,
                                            std::uint8_t bucket_count) {
  if (!(strength >= 0.0 && strength <= 1.0)) {
    throw std::invalid_argument("strength outside [0,1]");
  }
  const auto raw = static_cast<std::uint32_t>(
      std::floor(strength * static_cast<double>(bucket_count)));
  return static_cast<std::uint8_t>(
      std::min<std::uint32_t>(raw, bucket_count - 1u));
}

struct LutEntry {
  LutKey key;
  std::uint32_t n = 0;
  float r2 = 0.0f;
  float rmse = 0.0f;
  float mae = 0.0f;
  float within_010 = 0.0f;
  float within_020 = 0.0f;
  Risk risk = Risk::nominal;
};

/// Bitwise comparison (float fields compared by bit pattern so NaNs are
/// stable under round-trips).
[[nodiscard]] inline bool entries_identical(const LutEntry& a,
                                            const LutEntry& b) noexcept {
  const auto bits = [](float f) { return std::bit_cast<std::uint32_t>(f); };
  return a.key == b.key && a.n == b.n && bits(a.r2) == bits(b.r2) &&
         bits(a.rmse) == bits(b.rmse) && bits(a.mae) == bits(b.mae) &&
         bits(a.within_010) == bits(b.within_010) &&
         bits(a.within_020) == bits(b.within_020) && a.risk == b.risk;
}

/// Immutable after build/load; concurrent queries need no synchronization.
struct FaultLookupTable {
  std::uint16_t version = kFormatVersion;
  std::uint8_t bucket_count = kDefaultBucketCount;
  std::vector<LutEntry> entries;  // sorted ascending by key, unique
  std::uint32_t checksum = 0;     // set by serialize/deserialize

  [[nodiscard]] std::size_t serialized_bytes() const noexcept {
    return kHeaderBytes + entries.size() * kEntryBytes + kChecksumBytes;
  }
};

struct BuildInput {
  scenario::FaultCategory category;
  double strength = 0.0;
  metrics::MetricsSummary summary;
};

/// Buckets summaries by (category, strength) and combines same-bucket
/// entries by n-weighted mean of each metric. Inputs are canonically sorted
/// first, so the result is identical for any input permutation.
[[nodiscard]] inline FaultLookupTable build(
    std::span<const BuildInput> inputs,
    std::uint8_t bucket_count = kDefaultBucketCount,
    const RiskThresholds& thresholds = {}) {
  if (inputs.empty()) throw EmptyInputError("no summaries to build from");
  if (bucket_count < 2) {
    throw std::invalid_argument("bucket_count must be at least 2");
  }
  for (const auto& in : inputs) {
    if (in.summary.n < 1) {
      throw std::invalid_argument("summary sample count must be >= 1");
    }
  }

  std::map<LutKey, std::vector<const BuildInput*>> buckets;
  for (const auto& in : inputs) {
    buckets[LutKey{in.category.id(), bucket_of(in.strength, bucket_count)}]
        .push_back(&in);
  }

  FaultLookupTable table;
  table.bucket_count = bucket_count;
  table.entries.reserve(buckets.size());
  for (auto& [key, members] : buckets) {
    std::sort(members.begin(), members.end(),
              [](const BuildInput* a, const BuildInput* b) {
                const auto rank = [](const BuildInput* p) {
                  return std::tuple(p->strength, p->summary.n,
                                    p->summary.rmse, p->summary.mae,
                                    p->summary.r2_overall,
                                    p->summary.within_010,
                                    p->summary.within_020);
                };
                return rank(a) < rank(b);
              });
    double total_n = 0.0;
    double r2 = 0.0, rmse = 0.0, mae = 0.0, w10 = 0.0, w20 = 0.0;
    for (const auto* in : members) {
      const auto& s = in->summary;
      const double n = static_cast<double>(s.n);
      total_n += n;
      r2 += n * s.r2_overall;
      rmse += n * s.rmse;
      mae += n * s.mae;
      w10 += n * s.within_010;
      w20 += n * s.within_020;
    }
    LutEntry e;
    e.key = key;
    e.n = static_cast<std::uint32_t>(total_n);
    e.r2 = static_cast<float>(r2 / total_n);
    e.rmse = static_cast<float>(rmse / total_n);
    e.mae = static_cast<float>(mae / total_n);
    e.within_010 = static_cast<float>(w10 / total_n);
    e.within_020 = static_cast<float>(w20 / total_n);
    e.risk = classify_risk(e.within_010, e.r2, e.rmse, thresholds);
    table.entries.push_back(e);
  }
  return table;
}

namespace detail_lut {

inline void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}
inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
  out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
  out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xFF));
}
inline void put_f32(std::vector<std::uint8_t>& out, float v) {
  put_u32(out, std::bit_cast<std::uint32_t>(v));
}

[[nodiscard]] inline std::uint16_t get_u16(std::span<const std::uint8_t> b,
                                           std::size_t off) {
  return static_cast<std::uint16_t>(b[off] |
                                    (static_cast<std::uint16_t>(b[off + 1])
                                     << 8));
}
[[nodiscard]] inline std::uint32_t get_u32(std::span<const std::uint8_t> b,
                                           std::size_t off) {
  return static_cast<std::uint32_t>(b[off]) |
         (static_cast<std::uint32_t>(b[off + 1]) << 8) |
         (static_cast<std::uint32_t>(b[off + 2]) << 16) |
         (static_cast<std::uint32_t>(b[off + 3]) << 24);
}
[[nodiscard]] inline float get_f32(std::span<const std::uint8_t> b,
                                   std::size_t off) {
  return std::bit_cast<float>(get_u32(b, off));
}

}  // namespace detail_lut

/// Little-endian fixed layout: "FLUT", version u16, bucket_count u8,
/// reserved u8, entry_count u32, entries (category_id u16, bucket u8,
/// risk u8, n u32, r2/rmse/mae/within_010/within_020 f32), CRC-32 over all
/// preceding bytes. An empty table is exactly 16 bytes.
[[nodiscard]] inline std::vector<std::uint8_t> serialize(
    const FaultLookupTable& table) {
  namespace d = detail_lut;
  std::vector<std::uint8_t> out;
  out.reserve(table.serialized_bytes());
  out.insert(out.end(), kMagic.begin(), kMagic.end());
  d::put_u16(out, table.version);
  out.push_back(table.bucket_count);
  out.push_back(0);  // reserved
  d::put_u32(out, static_cast<std::uint32_t>(table.entries.size()));
  for (const auto& e : table.entries) {
    d::put_u16(out, e.key.category_id);
    out.push_back(e.key.bucket);
    out.push_back(static_cast<std::uint8_t>(e.risk));
    d::put_u32(out, e.n);
    d::put_f32(out, e.r2);
    d::put_f32(out, e.rmse);
    d::put_f32(out, e.mae);
    d::put_f32(out, e.within_010);
    d::put_f32(out, e.within_020);
  }
  const std::uint32_t crc = faultforge::detail::crc32(out);
  d::put_u32(out, crc);
  return out;
}

/// Checksum is verified before anything else, so any single corrupted byte
/// in a well-sized file surfaces as ChecksumError.
[[nodiscard]] inline FaultLookupTable deserialize(
    std::span<const std::uint8_t> bytes) {
  namespace d = detail_lut;
  if (bytes.size() < kHeaderBytes + kChecksumBytes) {
    throw TruncationError("lookup table shorter than the fixed header");
  }
  const std::uint32_t stored_crc =
      d::get_u32(bytes, bytes.size() - kChecksumBytes);
  const std::uint32_t actual_crc = faultforge::detail::crc32(
      bytes.subspan(0, bytes.size() - kChecksumBytes));
  if (stored_crc != actual_crc) {
    throw ChecksumError("lookup table CRC mismatch");
  }
  if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw MagicError("not a lookup table file");
  }
  FaultLookupTable table;
  table.version = d::get_u16(bytes, 4);
  if (table.version != kFormatVersion) {
    throw VersionError("unsupported lookup table version " +
                       std::to_string(table.version));
  }
  table.bucket_count = bytes[6];
  if (table.bucket_count < 2) {
    throw Error("bucket count below the minimum of 2");
  }
  const std::uint32_t count = d::get_u32(bytes, 8);
  if (bytes.size() !=
      kHeaderBytes + static_cast<std::size_t>(count) * kEntryBytes +
          kChecksumBytes) {
    throw TruncationError("entry count does not match file size");
  }
  table.entries.reserve(count);
  std::size_t off = kHeaderBytes;
  for (std::uint32_t i = 0; i < count; ++i, off += kEntryBytes) {
    LutEntry e;
    e.key.category_id = d::get_u16(bytes, off);
    e.key.bucket = bytes[off + 2];
    const std::uint8_t risk = bytes[off + 3];
    if (risk > 2) throw Error("invalid risk grade in entry");
    e.risk = static_cast<Risk>(risk);
    e.n = d::get_u32(bytes, off + 4);
    e.r2 = d::get_f32(bytes, off + 8);
    e.rmse = d::get_f32(bytes, off + 12);
    e.mae = d::get_f32(bytes, off + 16);
    e.within_010 = d::get_f32(bytes, off + 20);
    e.within_020 = d::get_f32(bytes, off + 24);
    if (e.key.category_id >= scenario::kCategoryCount) {
      throw Error("entry category id outside the registry");
    }
    if (e.key.bucket >= table.bucket_count) {
      throw Error("entry bucket out of range");
    }
    if (!table.entries.empty() && !(table.entries.back().key < e.key)) {
      throw Error("entries not sorted by unique key");
    }
    table.entries.push_back(e);
  }
  table.checksum = stored_crc;
  return table;
}

/// Binary search for (category, bucket). On a miss, the nearest populated
/// bucket of the same category within distance 1 is returned, preferring
/// the higher (more severe) neighbor; anything farther is not covered and
/// returns nullptr so the edge runtime can fail safe. Never allocates.
[[nodiscard]] inline const LutEntry* query(const FaultLookupTable& table,
                                           scenario::FaultCategory category,
                                           double strength) {
  const std::uint8_t bucket = bucket_of(strength, table.bucket_count);

  const auto find_exact = [&table](LutKey key) -> const LutEntry* {
    const auto it = std::lower_bound(
        table.entries.begin(), table.entries.end(), key,
        [](const LutEntry& e, LutKey k) { return e.key < k; });
    if (it != table.entries.end() && it->key == key) return &*it;
    return nullptr;
  };

  if (const auto* hit = find_exact({category.id(), bucket})) return hit;
  if (bucket + 1 < table.bucket_count) {
    if (const auto* hit = find_exact(
            {category.id(), static_cast<std::uint8_t>(bucket + 1)})) {
      return hit;
    }
  }
  if (bucket > 0) {
    if (const auto* hit = find_exact(
            {category.id(), static_cast<std::uint8_t>(bucket - 1)})) {
      return hit;
    }
  }
  return nullptr;
}

struct LatencyReport {
  std::uint64_t p50_ns = 0;
  std::uint64_t p99_ns = 0;
  std::uint64_t max_ns = 0;
  std::size_t iterations = 0;
  std::size_t table_bytes = 0;
  std::size_t hits = 0;
};

/// Times uniform-random valid queries against the resident table with a
/// monotonic clock. All buffers are allocated before the timed loop; the
/// queries themselves never allocate.
[[nodiscard]] inline LatencyReport bench_query(const FaultLookupTable& table,
                                               std::size_t iterations,
                                               std::uint64_t seed = 0x5EED) {
  if (iterations < 1000) {
    throw std::invalid_argument("bench needs at least 1000 iterations");
  }

  struct Probe {
    scenario::FaultCategory category;
    double strength;
  };
  std::vector<Probe> probes;
  probes.reserve(iterations);
  for (std::size_t i = 0; i < iterations; ++i) {
    const auto cat = scenario::FaultCategory::from_id(static_cast<std::uint16_t>(
        faultforge::detail::hash_at(seed, 2 * i) % scenario::kCategoryCount));
    probes.push_back(
        Probe{*cat, faultforge::detail::uniform_at(seed, 2 * i + 1)});
  }
  std::vector<std::uint64_t> samples(iterations);

  using clock = std::chrono::steady_clock;
  std::uint64_t found = 0;
  for (std::size_t i = 0; i < iterations; ++i) {
    const auto start = clock::now();
    const LutEntry* e = query(table, probes[i].category, probes[i].strength);
    const auto stop = clock::now();
    if (e != nullptr) ++found;
    samples[i] = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start)
            .count());
  }

  std::sort(samples.begin(), samples.end());
  LatencyReport report;
  report.iterations = iterations;
  report.table_bytes = table.serialized_bytes();
  report.p50_ns = samples[(iterations - 1) / 2];
  report.p99_ns = samples[(iterations - 1) * 99 / 100];
  report.max_ns = samples.back();
  report.hits = found;
  return report;
}

/// Audit CSV: one entry per row in key order.
[[nodiscard]] inline std::string entries_csv(const FaultLookupTable& table) {
  std::string out =
      "category,bucket,risk,n,r2,rmse,mae,within_010,within_020\n";
  for (const auto& e : table.entries) {
    const auto cat = scenario::FaultCategory::from_id(e.key.category_id);
    out += cat ? std::string(cat->name())
               : "ID" + std::to_string(e.key.category_id);
    out += ',';
    out += std::to_string(e.key.bucket);
    out += ',';
    out += risk_name(e.risk);
    out += ',';
    out += std::to_string(e.n);
    for (float v : {e.r2, e.rmse, e.mae, e.within_010, e.within_020}) {
      out += ',';
      out += faultforge::detail::format_double(static_cast<double>(v));
    }
    out += '\n';
  }
  return out;
}

}  // namespace faultforge::lut
