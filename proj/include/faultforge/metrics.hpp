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
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "faultforge/detail/strings.hpp"
#include "faultforge/error.hpp"
#include "faultforge/perception.hpp"

namespace faultforge::metrics {

inline constexpr double kPixelEdge = 224.0;
inline constexpr double kWithinTight = 0.10;
inline constexpr double kWithinCoarse = 0.20;

/// Per-group aggregate. MSE/RMSE/MAE pool both coordinates' residuals (2n
/// values); within-eps counts Euclidean spatial error against the tolerance.
/// R-squared fields are NaN (and `degenerate` set) when the corresponding
/// truth variance is zero while residuals are not.
struct MetricsSummary {
  std::string group;
  std::size_t n = 0;
  double r2_overall = 0.0;
  double r2_x = 0.0;
  double r2_y = 0.0;
  double mse = 0.0;
  double rmse = 0.0;
  double mae = 0.0;
  double within_010 = 0.0;
  double within_020 = 0.0;
  double mean_spatial_error = 0.0;
  bool degenerate = false;
};

namespace detail_metrics {

/// Neumaier compensated summation; keeps group aggregates exact enough for
/// fault folders of 10^5+ samples.
struct CompensatedSum {
  double sum = 0.0;
  double compensation = 0.0;

  void add(double value) noexcept {
    const double t = sum + value;
    if (std::abs(sum) >= std::abs(value)) {
      compensation += (sum - t) + value;
    } else {
      compensation += (value - t) + sum;
    }
    sum = t;
  }

  [[nodiscard]] double value() const noexcept { return sum + compensation; }
};

/// 1 - SS_res/SS_tot about the truth mean; NaN when SS_tot == 0 with
/// nonzero residuals, 1 when both are zero.
[[nodiscard]] inline double r_squared_or_nan(std::span<const double> truths,
                                             std::span<const double> preds) {
  CompensatedSum mean_acc;
  for (double t : truths) mean_acc.add(t);
  const double mean = mean_acc.value() / static_cast<double>(truths.size());

  CompensatedSum ss_res;
  CompensatedSum ss_tot;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    const double r = truths[i] - preds[i];
    const double d = truths[i] - mean;
    ss_res.add(r * r);
    ss_tot.add(d * d);
  }
  if (ss_tot.value() == 0.0) {
    return ss_res.value() == 0.0 ? 1.0
                                 : std::numeric_limits<double>::quiet_NaN();
  }
  return 1.0 - ss_res.value() / ss_tot.value();
}

}  // namespace detail_metrics

/// Euclidean distance between truth and prediction in normalized units.
[[nodiscard]] inline double spatial_error(const perception::PredictionRecord& r) {
  const double dx = r.truth.x - r.prediction.x;
  const double dy = r.truth.y - r.prediction.y;
  return std::sqrt(dx * dx + dy * dy);
}

[[nodiscard]] inline double spatial_error_px(
    const perception::PredictionRecord& r, double edge = kPixelEdge) {
  return spatial_error(r) * edge;
}

/// Coefficient of determination about the truth mean. Throws
/// DegenerateVarianceError when the truths are constant but residuals are
/// not; returns 1 when both sums vanish.
[[nodiscard]] inline double r_squared(std::span<const double> truths,
                                      std::span<const double> preds) {
  if (truths.size() != preds.size()) {
    throw LengthMismatchError("r_squared requires equal-length inputs");
  }
  if (truths.size() < 2) {
    throw std::invalid_argument("r_squared requires n >= 2");
  }
  const double r2 = detail_metrics::r_squared_or_nan(truths, preds);
  if (std::isnan(r2)) {
    throw DegenerateVarianceError(
        "truth variance is zero but residuals are not");
  }
  return r2;
}

/// Groups records by `group` and computes every aggregate. Degenerate
/// variance flags the group rather than dropping it. Output is sorted by
/// group name, so results do not depend on record order beyond the metrics'
/// own permutation invariance.
[[nodiscard]] inline std::vector<MetricsSummary> summarize(
    std::span<const perception::PredictionRecord> records) {
  if (records.empty()) throw EmptyGroupError("no records to summarize");

  std::map<std::string, std::vector<const perception::PredictionRecord*>>
      groups;
  for (const auto& r : records) groups[r.group].push_back(&r);

  std::vector<MetricsSummary> out;
  out.reserve(groups.size());
  for (const auto& [name, members] : groups) {
    if (members.size() < 2) {
      throw EmptyGroupError("group '" + name + "' has fewer than 2 records");
    }
    const auto n = members.size();

    std::vector<double> tx, ty, px, py;
    tx.reserve(n);
    ty.reserve(n);
    px.reserve(n);
    py.reserve(n);
    detail_metrics::CompensatedSum sq_residuals;
    detail_metrics::CompensatedSum abs_residuals;
    detail_metrics::CompensatedSum spatial;
    std::size_t within_tight = 0;
    std::size_t within_coarse = 0;
    for (const auto* r : members) {
      tx.push_back(r->truth.x);
      ty.push_back(r->truth.y);
      px.push_back(r->prediction.x);
      py.push_back(r->prediction.y);
      const double rx = r->truth.x - r->prediction.x;
      const double ry = r->truth.y - r->prediction.y;
      sq_residuals.add(rx * rx);
      sq_residuals.add(ry * ry);
      abs_residuals.add(std::abs(rx));
      abs_residuals.add(std::abs(ry));
      const double se = spatial_error(*r);
      spatial.add(se);
      if (se <= kWithinTight) ++within_tight;
      if (se <= kWithinCoarse) ++within_coarse;
    }

    // Overall R^2 pools both coordinates into one 2n-length computation.
    std::vector<double> t_all(tx);
    t_all.insert(t_all.end(), ty.begin(), ty.end());
    std::vector<double> p_all(px);
    p_all.insert(p_all.end(), py.begin(), py.end());

    MetricsSummary s;
    s.group = name;
    s.n = n;
    s.r2_x = detail_metrics::r_squared_or_nan(tx, px);
    s.r2_y = detail_metrics::r_squared_or_nan(ty, py);
    s.r2_overall = detail_metrics::r_squared_or_nan(t_all, p_all);
    s.mse = sq_residuals.value() / static_cast<double>(2 * n);
    s.rmse = std::sqrt(s.mse);
    s.mae = abs_residuals.value() / static_cast<double>(2 * n);
    s.within_010 = static_cast<double>(within_tight) / static_cast<double>(n);
    s.within_020 = static_cast<double>(within_coarse) / static_cast<double>(n);
    s.mean_spatial_error = spatial.value() / static_cast<double>(n);
    s.degenerate = std::isnan(s.r2_x) || std::isnan(s.r2_y) ||
                   std::isnan(s.r2_overall);
    out.push_back(std::move(s));
  }
  return out;
}

/// One row of the normal-vs-fault comparison. Relative deltas are undefined
/// (nullopt) when the baseline value is zero or not finite.
struct ComparisonRow {
  std::string baseline_group;
  std::string fault_group;
  double baseline_r2 = 0.0;
  double fault_r2 = 0.0;
  double baseline_rmse = 0.0;
  double fault_rmse = 0.0;
  std::optional<double> delta_r2_pct;
  std::optional<double> delta_rmse_pct;
};

[[nodiscard]] inline ComparisonRow compare(const MetricsSummary& baseline,
                                           const MetricsSummary& fault) {
  ComparisonRow row;
  row.baseline_group = baseline.group;
  row.fault_group = fault.group;
  row.baseline_r2 = baseline.r2_overall;
  row.fault_r2 = fault.r2_overall;
  row.baseline_rmse = baseline.rmse;
  row.fault_rmse = fault.rmse;
  if (baseline.rmse != 0.0 && std::isfinite(baseline.rmse) &&
      std::isfinite(fault.rmse)) {
    row.delta_rmse_pct =
        100.0 * (fault.rmse - baseline.rmse) / baseline.rmse;
  }
  if (baseline.r2_overall != 0.0 && std::isfinite(baseline.r2_overall) &&
      std::isfinite(fault.r2_overall)) {
    row.delta_r2_pct = 100.0 * (fault.r2_overall - baseline.r2_overall) /
                       baseline.r2_overall;
  }
  return row;
}

inline constexpr std::string_view kCsvHeader =
    "group,n,r2_overall,r2_x,r2_y,mse,rmse,mae,within_010,within_020,"
    "mean_spatial_error";

/// CSV emission, one summary per row, fixed column order. Doubles use the
/// shortest round-trip form so downstream consumers see exact values.
[[nodiscard]] inline std::string to_csv(
    std::span<const MetricsSummary> summaries) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& s : summaries) {
    if (s.group.find_first_of(",\"\n") != std::string::npos) {
      throw SchemaError(0, "group name contains CSV delimiter: " + s.group);
    }
    out += s.group;
    out += ',';
    out += std::to_string(s.n);
    for (double v : {s.r2_overall, s.r2_x, s.r2_y, s.mse, s.rmse, s.mae,
                     s.within_010, s.within_020, s.mean_spatial_error}) {
      out += ',';
      out += faultforge::detail::format_double(v);
    }
    out += '\n';
  }
  return out;
}

[[nodiscard]] inline std::vector<MetricsSummary> from_csv(
    std::string_view text) {
  std::vector<MetricsSummary> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    const auto line = faultforge::detail::trim(text.substr(pos, end - pos));
    pos = end + 1;
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != kCsvHeader) {
        throw SchemaError(line_no, "unexpected CSV header");
      }
      continue;
    }
    const auto fields = faultforge::detail::split(line, ',');
    if (fields.size() != 11) {
      throw SchemaError(line_no, "expected 11 CSV fields, got " +
                                     std::to_string(fields.size()));
    }
    MetricsSummary s;
    s.group = std::string(fields[0]);
    if (s.group.empty()) throw SchemaError(line_no, "empty group");
    const auto n = faultforge::detail::parse_u64(fields[1]);
    if (!n) throw SchemaError(line_no, "bad sample count");
    s.n = *n;
    double* const targets[] = {&s.r2_overall, &s.r2_x,       &s.r2_y,
                               &s.mse,        &s.rmse,       &s.mae,
                               &s.within_010, &s.within_020, &s.mean_spatial_error};
    for (std::size_t i = 0; i < 9; ++i) {
      const auto v = faultforge::detail::parse_double(fields[i + 2]);
      if (!v) {
        throw SchemaError(line_no,
                          "bad numeric field #" + std::to_string(i + 2));
      }
      *targets[i] = *v;
    }
    s.degenerate = std::isnan(s.r2_x) || std::isnan(s.r2_y) ||
                   std::isnan(s.r2_overall);
    out.push_back(std::move(s));
  }
  return out;
}

/// Human-readable table mirroring the normal-vs-fault comparison layout.
[[nodiscard]] inline std::string comparison_table(
    const MetricsSummary& baseline, std::span<const MetricsSummary> faults) {
  const auto fmt_val = [](double v) {
    char buf[32];
    if (std::isnan(v)) {
      std::snprintf(buf, sizeof(buf), "%10s", "n/a");
    } else {
      std::snprintf(buf, sizeof(buf), "%10.4f", v);
    }
    return std::string(buf);
  };
  const auto fmt_pct = [](std::optional<double> v) {
    char buf[32];
    if (!v) {
      std::snprintf(buf, sizeof(buf), "%10s", "undefined");
    } else {
      std::snprintf(buf, sizeof(buf), "%+9.1f%%", *v);
    }
    return std::string(buf);
  };

  std::string out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-28s%10s%10s%10s%12s%12s%11s%11s\n",
                "Condition", "R2", "MSE", "RMSE", "Within-0.10",
                "Within-0.20", "dR2", "dRMSE");
  out += line;
  out += std::string(104, '-');
  out += '\n';

  std::snprintf(line, sizeof(line), "%-28s%s%s%s  %s  %s%11s%11s\n",
                (baseline.group + " (baseline)").c_str(),
                fmt_val(baseline.r2_overall).c_str(),
                fmt_val(baseline.mse).c_str(), fmt_val(baseline.rmse).c_str(),
                fmt_val(baseline.within_010).c_str(),
                fmt_val(baseline.within_020).c_str(), "-", "-");
  out += line;

  std::optional<double> worst_r2;
  std::optional<double> worst_rmse;
  for (const auto& f : faults) {
    const ComparisonRow row = compare(baseline, f);
    std::snprintf(line, sizeof(line), "%-28s%s%s%s  %s  %s %s %s\n",
                  f.group.c_str(), fmt_val(f.r2_overall).c_str(),
                  fmt_val(f.mse).c_str(), fmt_val(f.rmse).c_str(),
                  fmt_val(f.within_010).c_str(),
                  fmt_val(f.within_020).c_str(),
                  fmt_pct(row.delta_r2_pct).c_str(),
                  fmt_pct(row.delta_rmse_pct).c_str());
    out += line;
    if (row.delta_r2_pct &&
        (!worst_r2 || *row.delta_r2_pct < *worst_r2)) {
      worst_r2 = row.delta_r2_pct;
    }
    if (row.delta_rmse_pct &&
        (!worst_rmse || *row.delta_rmse_pct > *worst_rmse)) {
      worst_rmse = row.delta_rmse_pct;
    }
  }

  if (!faults.empty()) {
    out += std::string(104, '-');
    out += '\n';
    std::snprintf(line, sizeof(line), "%-82s%s %s\n",
                  "Max degradation vs. baseline",
                  fmt_pct(worst_r2).c_str(), fmt_pct(worst_rmse).c_str());
    out += line;
  }
  return out;
}

}  // namespace faultforge::metrics
