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

#include "faultforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <catch2/catch_amalgamated.hpp>

using namespace faultforge;
using namespace faultforge::metrics;
using faultforge::perception::PredictionRecord;

namespace {

PredictionRecord rec(const std::string& group, double gx, double gy, double px,
                     double py, const std::string& id = "img") {
  return PredictionRecord{id, group, {gx, gy}, {px, py}};
}

/// Independent oracle: plain-loop recomputation with none of the library's
/// accumulation machinery.
struct NaiveSummary {
  double r2_overall, r2_x, r2_y, mse, rmse, mae;
  double within_010, within_020, mean_spatial_error;
};

double naive_r2(const std::vector<double>& t, const std::vector<double>& p) {
  double mean = 0;
  for (double v : t) mean += v;
  mean /= static_cast<double>(t.size());
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    ss_res += (t[i] - p[i]) * (t[i] - p[i]);
    ss_tot += (t[i] - mean) * (t[i] - mean);
  }
  if (ss_tot == 0) {
    return ss_res == 0 ? 1.0 : std::numeric_limits<double>::quiet_NaN();
  }
  return 1.0 - ss_res / ss_tot;
}

NaiveSummary naive_summarize(const std::vector<PredictionRecord>& records) {
  NaiveSummary s{};
  std::vector<double> tx, ty, px, py, t_all, p_all;
  double sq = 0, ab = 0, spatial = 0;
  std::size_t w10 = 0, w20 = 0;
  for (const auto& r : records) {
    tx.push_back(r.truth.x);
    ty.push_back(r.truth.y);
    px.push_back(r.prediction.x);
    py.push_back(r.prediction.y);
    const double dx = r.truth.x - r.prediction.x;
    const double dy = r.truth.y - r.prediction.y;
    sq += dx * dx + dy * dy;
    ab += std::abs(dx) + std::abs(dy);
    const double se = std::sqrt(dx * dx + dy * dy);
    spatial += se;
    if (se <= 0.10) ++w10;
    if (se <= 0.20) ++w20;
  }
  t_all = tx;
  t_all.insert(t_all.end(), ty.begin(), ty.end());
  p_all = px;
  p_all.insert(p_all.end(), py.begin(), py.end());
  const auto n = static_cast<double>(records.size());
  s.r2_x = naive_r2(tx, px);
  s.r2_y = naive_r2(ty, py);
  s.r2_overall = naive_r2(t_all, p_all);
  s.mse = sq / (2 * n);
  s.rmse = std::sqrt(s.mse);
  s.mae = ab / (2 * n);
  s.within_010 = static_cast<double>(w10) / n;
  s.within_020 = static_cast<double>(w20) / n;
  s.mean_spatial_error = spatial / n;
  return s;
}

std::vector<PredictionRecord> random_group(std::mt19937_64& rng,
                                           const std::string& name,
                                           std::size_t n) {
  std::uniform_real_distribution<double> coord(0.0, 1.0);
  std::uniform_real_distribution<double> jitter(-0.2, 0.2);
  std::vector<PredictionRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double gx = coord(rng);
    const double gy = coord(rng);
    const double px = std::clamp(gx + jitter(rng), 0.0, 1.0);
    const double py = std::clamp(gy + jitter(rng), 0.0, 1.0);
    out.push_back(rec(name, gx, gy, px, py, "r" + std::to_string(i)));
  }
  return out;
}

}  // namespace

TEST_CASE("spatial error arithmetic") {
  CHECK(spatial_error(rec("g", 0, 0, 0.3, 0.4)) == 0.5);
  CHECK(spatial_error_px(rec("g", 0, 0, 0.3, 0.4)) == 112.0);
  CHECK(spatial_error(rec("g", 0.4, 0.9, 0.4, 0.9)) == 0.0);

  // Reported pixel magnitudes survive the normalized round trip at three
  // decimal places.
  const double px_err = 52.154;
  const auto r = rec("g", 0.5, 0.75, 0.5 + px_err / 224.0, 0.75);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", spatial_error_px(r));
  CHECK(std::string(buf) == "52.154");
}

TEST_CASE("r_squared basics") {
  const std::vector<double> t{0.0, 1.0, 2.0};

  SECTION("perfect prediction") {
    CHECK(r_squared(t, t) == 1.0);
  }

  SECTION("mean predictor scores zero") {
    const std::vector<double> p{1.0, 1.0, 1.0};
    CHECK(r_squared(t, p) == Catch::Approx(0.0).margin(1e-15));
  }

  SECTION("hand-computed residuals") {
    const std::vector<double> p{0.0, 1.0, 1.0};
    CHECK(r_squared(t, p) == Catch::Approx(0.5).epsilon(1e-12));
  }

  SECTION("length mismatch") {
    const std::vector<double> p{0.0, 1.0};
    CHECK_THROWS_AS(r_squared(t, p), LengthMismatchError);
  }

  SECTION("degenerate variance surfaces") {
    const std::vector<double> flat{0.5, 0.5, 0.5};
    const std::vector<double> p{0.4, 0.5, 0.6};
    CHECK_THROWS_AS(r_squared(flat, p), DegenerateVarianceError);
    CHECK(r_squared(flat, flat) == 1.0);  // SS_res = SS_tot = 0
  }

  SECTION("fewer than two samples") {
    const std::vector<double> one{0.5};
    CHECK_THROWS_AS(r_squared(one, one), std::invalid_argument);
  }
}

TEST_CASE("summarize counts within-eps by spatial error") {
  const std::vector<PredictionRecord> records{
      rec("g", 0.5, 0.5, 0.55, 0.5),   // se 0.05
      rec("g", 0.2, 0.5, 0.35, 0.5),   // se 0.15
      rec("g", 0.8, 0.5, 0.55, 0.5),   // se 0.25
  };
  const auto sums = summarize(records);
  REQUIRE(sums.size() == 1);
  CHECK(sums[0].n == 3);
  CHECK(sums[0].within_010 == Catch::Approx(1.0 / 3.0));
  CHECK(sums[0].within_020 == Catch::Approx(2.0 / 3.0));
}

TEST_CASE("summarize on perfect predictions") {
  std::vector<PredictionRecord> records;
  for (int i = 0; i < 10; ++i) {
    const double x = 0.1 + 0.08 * i;
    records.push_back(rec("g", x, 1.0 - x, x, 1.0 - x));
  }
  const auto s = summarize(records)[0];
  CHECK(s.rmse == 0.0);
  CHECK(s.mae == 0.0);
  CHECK(s.r2_overall == 1.0);
  CHECK(s.within_010 == 1.0);
  CHECK(s.within_020 == 1.0);
  CHECK(s.mean_spatial_error == 0.0);
  CHECK_FALSE(s.degenerate);
}

TEST_CASE("summarize flags degenerate groups instead of dropping them") {
  // Constant truth y with imperfect predictions: r2_y undefined.
  const std::vector<PredictionRecord> records{
      rec("g", 0.2, 0.75, 0.25, 0.74),
      rec("g", 0.5, 0.75, 0.45, 0.76),
      rec("g", 0.8, 0.75, 0.85, 0.73),
  };
  const auto s = summarize(records)[0];
  CHECK(s.degenerate);
  CHECK(std::isnan(s.r2_y));
  CHECK_FALSE(std::isnan(s.r2_x));
  CHECK_FALSE(std::isnan(s.r2_overall));
  CHECK(s.rmse > 0.0);
}

TEST_CASE("summarize rejects undersized groups") {
  CHECK_THROWS_AS(summarize(std::vector<PredictionRecord>{}), EmptyGroupError);
  const std::vector<PredictionRecord> one{rec("g", 0.5, 0.5, 0.5, 0.5)};
  CHECK_THROWS_AS(summarize(one), EmptyGroupError);
}

TEST_CASE("summarize matches the naive oracle on random groups") {
  std::mt19937_64 rng(777);
  for (int round = 0; round < 20; ++round) {
    const auto records = random_group(rng, "g", 2 + rng() % 63);
    const auto got = summarize(records)[0];
    const auto want = naive_summarize(records);
    CHECK(got.r2_overall == Catch::Approx(want.r2_overall).margin(1e-9));
    CHECK(got.r2_x == Catch::Approx(want.r2_x).margin(1e-9));
    CHECK(got.r2_y == Catch::Approx(want.r2_y).margin(1e-9));
    CHECK(got.mse == Catch::Approx(want.mse).margin(1e-9));
    CHECK(got.rmse == Catch::Approx(want.rmse).margin(1e-9));
    CHECK(got.mae == Catch::Approx(want.mae).margin(1e-9));
    CHECK(got.within_010 == want.within_010);
    CHECK(got.within_020 == want.within_020);
    CHECK(got.mean_spatial_error ==
          Catch::Approx(want.mean_spatial_error).margin(1e-9));
  }
}

TEST_CASE("metrics invariants hold on random data") {
  std::mt19937_64 rng(31337);
  for (int round = 0; round < 25; ++round) {
    auto records = random_group(rng, "g", 4 + rng() % 40);
    const auto s = summarize(records)[0];

    // rmse^2 == mse, mae <= rmse, within monotone in eps.
    CHECK(std::abs(s.rmse * s.rmse - s.mse) <= 1e-12);
    CHECK(s.mae <= s.rmse + 1e-15);
    CHECK(s.within_010 <= s.within_020);

    // Permutation invariance.
    std::shuffle(records.begin(), records.end(), rng);
    const auto s2 = summarize(records)[0];
    CHECK(s.rmse == s2.rmse);
    CHECK(s.mae == s2.mae);
    CHECK(s.r2_overall == s2.r2_overall);
    CHECK(s.within_010 == s2.within_010);

    // Appending a zero-residual record never hurts.
    auto extended = records;
    extended.push_back(rec("g", 0.31, 0.62, 0.31, 0.62, "perfect"));
    const auto s3 = summarize(extended)[0];
    CHECK(s3.within_010 >= s.within_010);
    CHECK(s3.rmse <= s.rmse + 1e-15);
  }
}

TEST_CASE("compare reproduces the headline relative deltas") {
  MetricsSummary baseline;
  baseline.group = "NORMAL";
  baseline.n = 100;
  baseline.r2_overall = 0.85;
  baseline.rmse = 0.105;
  MetricsSummary fault;
  fault.group = "FOG_SLIGHT_015";
  fault.n = 100;
  fault.r2_overall = 0.755;
  fault.rmse = 0.209;

  const auto row = compare(baseline, fault);
  REQUIRE(row.delta_rmse_pct.has_value());
  REQUIRE(row.delta_r2_pct.has_value());
  CHECK(*row.delta_rmse_pct == Catch::Approx(99.0).margin(0.5));
  CHECK(*row.delta_r2_pct == Catch::Approx(-11.2).margin(0.5));

  SECTION("identity comparison gives zero deltas") {
    const auto same = compare(baseline, baseline);
    CHECK(*same.delta_rmse_pct == 0.0);
    CHECK(*same.delta_r2_pct == 0.0);
  }

  SECTION("zero baseline rmse is reported undefined") {
    MetricsSummary perfect = baseline;
    perfect.rmse = 0.0;
    const auto row2 = compare(perfect, fault);
    CHECK_FALSE(row2.delta_rmse_pct.has_value());
  }
}

TEST_CASE("csv round trip preserves every field") {
  std::mt19937_64 rng(4242);
  std::vector<MetricsSummary> sums;
  for (int g = 0; g < 8; ++g) {
    const auto records =
        random_group(rng, "GROUP_" + std::to_string(g), 3 + rng() % 20);
    auto s = summarize(records)[0];
    sums.push_back(std::move(s));
  }
  // One degenerate group keeps NaN handling honest.
  const std::vector<PredictionRecord> flat{
      rec("FLAT", 0.5, 0.75, 0.52, 0.75), rec("FLAT", 0.5, 0.75, 0.48, 0.75)};
  sums.push_back(summarize(flat)[0]);

  const std::string csv = to_csv(sums);
  const auto parsed = from_csv(csv);
  REQUIRE(parsed.size() == sums.size());
  for (std::size_t i = 0; i < sums.size(); ++i) {
    CHECK(parsed[i].group == sums[i].group);
    CHECK(parsed[i].n == sums[i].n);
    const auto same = [](double a, double b) {
      return (std::isnan(a) && std::isnan(b)) || a == b;
    };
    CHECK(same(parsed[i].r2_overall, sums[i].r2_overall));
    CHECK(same(parsed[i].r2_x, sums[i].r2_x));
    CHECK(same(parsed[i].r2_y, sums[i].r2_y));
    CHECK(same(parsed[i].mse, sums[i].mse));
    CHECK(same(parsed[i].rmse, sums[i].rmse));
    CHECK(same(parsed[i].mae, sums[i].mae));
    CHECK(same(parsed[i].within_010, sums[i].within_010));
    CHECK(same(parsed[i].within_020, sums[i].within_020));
    CHECK(same(parsed[i].mean_spatial_error, sums[i].mean_spatial_error));
    CHECK(parsed[i].degenerate == sums[i].degenerate);
  }
}

TEST_CASE("csv parser rejects malformed input") {
  CHECK_THROWS_AS(from_csv("not,the,header\nFOG,2,1,1,1,0,0,0,1,1,0\n"),
                  SchemaError);
  const std::string header(kCsvHeader);
  CHECK_THROWS_AS(from_csv(header + "\nFOG,2,1,1\n"), SchemaError);
  CHECK_THROWS_AS(from_csv(header + "\nFOG,x,1,1,1,0,0,0,1,1,0\n"),
                  SchemaError);
}

TEST_CASE("comparison table lists baseline, rows and max degradation") {
  MetricsSummary baseline;
  baseline.group = "NORMAL";
  baseline.n = 50;
  baseline.r2_overall = 0.85;
  baseline.mse = 0.011;
  baseline.rmse = 0.105;
  baseline.within_010 = 0.8;
  baseline.within_020 = 0.95;

  MetricsSummary fog = baseline;
  fog.group = "FOG_SLIGHT_015";
  fog.r2_overall = 0.755;
  fog.rmse = 0.209;

  const auto table = comparison_table(baseline, std::vector{fog});
  CHECK(table.find("NORMAL (baseline)") != std::string::npos);
  CHECK(table.find("FOG_SLIGHT_015") != std::string::npos);
  CHECK(table.find("Max degradation") != std::string::npos);
  CHECK(table.find("+99.0%") != std::string::npos);
  CHECK(table.find("-11.2%") != std::string::npos);
}
