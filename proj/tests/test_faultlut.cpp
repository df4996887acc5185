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

#include "faultforge/faultlut.hpp"

#include <algorithm>
#include <random>

#include <catch2/catch_amalgamated.hpp>
#include <zlib.h>

using namespace faultforge;
using namespace faultforge::lut;

namespace {

metrics::MetricsSummary summary_of(double r2, double rmse, double mae,
                                   double w10, double w20, std::size_t n) {
  metrics::MetricsSummary s;
  s.group = "G";
  s.n = n;
  s.r2_overall = r2;
  s.r2_x = r2;
  s.r2_y = r2;
  s.mse = rmse * rmse;
  s.rmse = rmse;
  s.mae = mae;
  s.within_010 = w10;
  s.within_020 = w20;
  s.mean_spatial_error = mae;
  return s;
}

BuildInput input_of(scenario::FaultCategory cat, double strength, double r2,
                    double rmse, std::size_t n = 10) {
  return BuildInput{cat, strength, summary_of(r2, rmse, rmse * 0.7, 0.6, 0.8, n)};
}

FaultLookupTable random_table(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> metric(0.0, 1.0);
  std::vector<BuildInput> inputs;
  const std::size_t n = 1 + rng() % 40;
  for (std::size_t i = 0; i < n; ++i) {
    const auto cat = *scenario::FaultCategory::from_id(
        static_cast<std::uint16_t>(rng() % scenario::kCategoryCount));
    inputs.push_back(BuildInput{
        cat, metric(rng),
        summary_of(metric(rng), metric(rng), metric(rng), metric(rng),
                   metric(rng), 1 + rng() % 500)});
  }
  return build(inputs);
}

}  // namespace

TEST_CASE("severity buckets") {
  CHECK(bucket_of(0.0, 10) == 0);
  CHECK(bucket_of(0.14, 10) == 1);
  CHECK(bucket_of(0.99, 10) == 9);
  CHECK(bucket_of(1.0, 10) == 9);  // clamped into the last bucket
  CHECK(bucket_of(0.5, 4) == 2);
  CHECK_THROWS_AS(bucket_of(1.5, 10), std::invalid_argument);
}

TEST_CASE("risk rule anchors to the reported extremes") {
  // Worst fault: within-0.10 ~0.310, R^2 ~0.755 -> critical.
  CHECK(classify_risk(0.310, 0.755, 0.209) == Risk::critical);
  // Best fault: within-0.10 ~0.445, RMSE ~0.181 -> degraded.
  CHECK(classify_risk(0.445, 0.835, 0.181) == Risk::degraded);
  // Clean baseline-grade metrics -> nominal.
  CHECK(classify_risk(0.80, 0.85, 0.105) == Risk::nominal);
  // Each critical trigger works alone.
  CHECK(classify_risk(0.34, 0.90, 0.05) == Risk::critical);
  CHECK(classify_risk(0.60, 0.70, 0.05) == Risk::critical);
  // Each degraded trigger works alone.
  CHECK(classify_risk(0.45, 0.90, 0.05) == Risk::degraded);
  CHECK(classify_risk(0.60, 0.90, 0.16) == Risk::degraded);
}

TEST_CASE("build buckets by strength and weights by sample count") {
  SECTION("single summary lands in floor(strength*B)") {
    const auto table =
        build(std::vector{input_of(scenario::kFog, 0.14, 0.8, 0.1)});
    REQUIRE(table.entries.size() == 1);
    CHECK(table.entries[0].key.category_id == scenario::kFog.id());
    CHECK(table.entries[0].key.bucket == 1);
  }

  SECTION("same-bucket summaries combine by n-weighted mean") {
    const auto table = build(std::vector{
        input_of(scenario::kFog, 0.61, 0.8, 0.1, 10),
        input_of(scenario::kFog, 0.69, 0.8, 0.2, 30),
    });
    REQUIRE(table.entries.size() == 1);
    CHECK(table.entries[0].n == 40);
    CHECK(table.entries[0].rmse == Catch::Approx(0.175));
  }

  SECTION("worst-case calibration metrics grade critical") {
    const auto table = build(std::vector{BuildInput{
        scenario::kFog, 0.15, summary_of(0.755, 0.209, 0.15, 0.310, 0.662, 100)}});
    CHECK(table.entries[0].risk == Risk::critical);
  }

  SECTION("permutation of the input changes nothing") {
    std::mt19937_64 rng(9001);
    std::uniform_real_distribution<double> metric(0.0, 1.0);
    std::vector<BuildInput> inputs;
    for (int i = 0; i < 25; ++i) {
      inputs.push_back(BuildInput{
          *scenario::FaultCategory::from_id(static_cast<std::uint16_t>(i % 5)),
          metric(rng),
          summary_of(metric(rng), metric(rng), metric(rng), metric(rng),
                     metric(rng), 1 + i)});
    }
    const auto base_bytes = serialize(build(inputs));
    for (int round = 0; round < 10; ++round) {
      std::shuffle(inputs.begin(), inputs.end(), rng);
      CHECK(serialize(build(inputs)) == base_bytes);
    }
  }

  SECTION("empty input rejected") {
    CHECK_THROWS_AS(build({}), EmptyInputError);
  }

  SECTION("zero-sample summary rejected") {
    CHECK_THROWS_AS(build(std::vector{input_of(scenario::kFog, 0.5, 0.8, 0.1, 0)}),
                    std::invalid_argument);
  }
}

TEST_CASE("serialized layout is bit-exact") {
  SECTION("empty table is exactly 16 bytes") {
    FaultLookupTable empty;
    const auto bytes = serialize(empty);
    REQUIRE(bytes.size() == 16);
    CHECK(bytes[0] == 'F');
    CHECK(bytes[1] == 'L');
    CHECK(bytes[2] == 'U');
    CHECK(bytes[3] == 'T');
    CHECK(bytes[4] == 1);   // version LE
    CHECK(bytes[5] == 0);
    CHECK(bytes[6] == 10);  // bucket count
    CHECK(bytes[7] == 0);   // reserved
    CHECK(bytes[8] == 0);   // entry count LE
  }

  SECTION("a full 22x10 table is 16 + 220*28 bytes") {
    std::vector<BuildInput> inputs;
    for (const auto cat : scenario::all_categories()) {
      for (int b = 0; b < 10; ++b) {
        inputs.push_back(input_of(cat, (b + 0.5) / 10.0, 0.8, 0.1));
      }
    }
    const auto table = build(inputs);
    REQUIRE(table.entries.size() == 220);
    CHECK(serialize(table).size() == 16 + 220 * 28);
    CHECK(table.serialized_bytes() == 6176);
  }

  SECTION("crc32 implementation matches zlib") {
    const auto bytes = serialize(
        build(std::vector{input_of(scenario::kRain, 0.4, 0.7, 0.12)}));
    const auto payload_len = bytes.size() - 4;
    const auto expected = static_cast<std::uint32_t>(
        ::crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()),
                static_cast<uInt>(payload_len)));
    const std::uint32_t stored =
        static_cast<std::uint32_t>(bytes[payload_len]) |
        (static_cast<std::uint32_t>(bytes[payload_len + 1]) << 8) |
        (static_cast<std::uint32_t>(bytes[payload_len + 2]) << 16) |
        (static_cast<std::uint32_t>(bytes[payload_len + 3]) << 24);
    CHECK(stored == expected);
  }
}

TEST_CASE("serialize/deserialize round trip on random tables") {
  std::mt19937_64 rng(123);
  for (int round = 0; round < 100; ++round) {
    const auto table = random_table(rng);
    const auto bytes = serialize(table);
    const auto back = deserialize(std::span(bytes.data(), bytes.size()));
    REQUIRE(back.entries.size() == table.entries.size());
    CHECK(back.version == table.version);
    CHECK(back.bucket_count == table.bucket_count);
    for (std::size_t i = 0; i < table.entries.size(); ++i) {
      CHECK(entries_identical(back.entries[i], table.entries[i]));
    }
    CHECK(serialize(back) == bytes);
  }
}

TEST_CASE("every single-byte corruption raises ChecksumError") {
  std::mt19937_64 rng(321);
  const auto table = random_table(rng);
  const auto bytes = serialize(table);
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    auto corrupted = bytes;
    corrupted[i] ^= 0x01;
    CHECK_THROWS_AS(
        deserialize(std::span(corrupted.data(), corrupted.size())),
        ChecksumError);
  }
}

TEST_CASE("structural errors are distinguished once the checksum passes") {
  const auto table =
      build(std::vector{input_of(scenario::kFog, 0.5, 0.8, 0.1)});
  auto bytes = serialize(table);

  const auto refresh_crc = [](std::vector<std::uint8_t>& b) {
    const auto crc =
        faultforge::detail::crc32(std::span(b.data(), b.size() - 4));
    b[b.size() - 4] = static_cast<std::uint8_t>(crc & 0xFF);
    b[b.size() - 3] = static_cast<std::uint8_t>((crc >> 8) & 0xFF);
    b[b.size() - 2] = static_cast<std::uint8_t>((crc >> 16) & 0xFF);
    b[b.size() - 1] = static_cast<std::uint8_t>((crc >> 24) & 0xFF);
  };

  SECTION("bad magic") {
    auto bad = bytes;
    bad[0] = 'X';
    refresh_crc(bad);
    CHECK_THROWS_AS(deserialize(std::span(bad.data(), bad.size())), MagicError);
  }

  SECTION("unsupported version") {
    auto bad = bytes;
    bad[4] = 9;
    refresh_crc(bad);
    CHECK_THROWS_AS(deserialize(std::span(bad.data(), bad.size())),
                    VersionError);
  }

  SECTION("entry count mismatch") {
    auto bad = bytes;
    bad[8] = 7;
    refresh_crc(bad);
    CHECK_THROWS_AS(deserialize(std::span(bad.data(), bad.size())),
                    TruncationError);
  }

  SECTION("shorter than a header") {
    const std::vector<std::uint8_t> tiny(7, 0);
    CHECK_THROWS_AS(deserialize(std::span(tiny.data(), tiny.size())),
                    TruncationError);
  }
}

TEST_CASE("query resolves exact and distance-1 buckets only") {
  const auto table = build(std::vector{
      input_of(scenario::kFog, 0.15, 0.8, 0.1),   // bucket 1
      input_of(scenario::kFog, 0.35, 0.7, 0.15),  // bucket 3
      input_of(scenario::kRain, 0.95, 0.6, 0.2),  // bucket 9
  });

  SECTION("exact hit") {
    const auto* e = query(table, scenario::kFog, 0.15);
    REQUIRE(e != nullptr);
    CHECK(e->key.bucket == 1);
  }

  SECTION("distance-1 fallback") {
    const auto* e = query(table, scenario::kFog, 0.45);  // bucket 4 -> 3
    REQUIRE(e != nullptr);
    CHECK(e->key.bucket == 3);
    const auto* e2 = query(table, scenario::kFog, 0.05);  // bucket 0 -> 1
    REQUIRE(e2 != nullptr);
    CHECK(e2->key.bucket == 1);
  }

  SECTION("the more severe neighbor wins a tie") {
    const auto* e = query(table, scenario::kFog, 0.25);  // bucket 2: 1 and 3
    REQUIRE(e != nullptr);
    CHECK(e->key.bucket == 3);
  }

  SECTION("distance 2 is not covered") {
    CHECK(query(table, scenario::kFog, 0.75) == nullptr);
  }

  SECTION("absent category is not covered") {
    CHECK(query(table, scenario::kMotionBlur, 0.15) == nullptr);
  }

  SECTION("round trip through serialization") {
    const auto bytes = serialize(table);
    const auto loaded = deserialize(std::span(bytes.data(), bytes.size()));
    const auto* e = query(loaded, scenario::kRain, 0.95);
    REQUIRE(e != nullptr);
    CHECK(e->rmse == Catch::Approx(0.2));
  }
}

TEST_CASE("bench reports ordered percentiles and the table footprint") {
  std::vector<BuildInput> inputs;
  for (const auto cat : scenario::all_categories()) {
    for (int b = 0; b < 10; ++b) {
      inputs.push_back(input_of(cat, (b + 0.5) / 10.0, 0.8, 0.1));
    }
  }
  const auto table = build(inputs);
  const auto report = bench_query(table, 20000);
  CHECK(report.iterations == 20000);
  CHECK(report.table_bytes == 6176);
  CHECK(report.p50_ns <= report.p99_ns);
  CHECK(report.p99_ns <= report.max_ns);
  CHECK(report.hits == 20000);  // full table: every probe hits

  CHECK_THROWS_AS(bench_query(table, 999), std::invalid_argument);
}

TEST_CASE("entries csv lists category names and risk grades") {
  const auto table = build(std::vector{
      BuildInput{scenario::kFog, 0.15,
                 summary_of(0.755, 0.209, 0.15, 0.310, 0.662, 100)}});
  const auto csv = entries_csv(table);
  CHECK(csv.find("FOG,1,critical,100,") != std::string::npos);
}
