// Copyright 2026 The stallsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "stallsim/metrics.h"

#include <algorithm>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace stallsim::metrics {

Micros IntervalStall(const StallSample& sample) {
  return std::max(sample.s_mem, sample.s_io);
}

absl::StatusOr<PeriodStallSummary> AccumulatePeriod(
    std::span<const StallSample> samples, int64_t period_index) {
  PeriodStallSummary summary{.period_index = period_index};
  for (size_t i = 0; i < samples.size(); ++i) {
    if (i > 0 && samples[i].interval_index <= samples[i - 1].interval_index) {
      return absl::InvalidArgumentError(absl::StrCat(
          "interval_index ", samples[i].interval_index, " at position ", i,
          " does not follow ", samples[i - 1].interval_index));
    }
    summary.s_period += IntervalStall(samples[i]);
    ++summary.sample_count;
  }
  return summary;
}

absl::StatusOr<double> StallPercentage(Micros total_stall, Micros window) {
  if (window <= Micros::zero()) {
    return absl::InvalidArgumentError("percentage window must be positive");
  }
  if (total_stall < Micros::zero() || total_stall > window) {
    return absl::InvalidArgumentError(
        absl::StrCat("stall ", total_stall.count(), "us outside window of ",
                     window.count(), "us"));
  }
  return 100.0 * static_cast<double>(total_stall.count()) /
         static_cast<double>(window.count());
}

absl::StatusOr<LinearFit> FitStallLinearity(
    std::span<const StallPoint> points) {
  if (points.size() < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("linear fit needs at least 2 points, got ",
                     points.size()));
  }
  // Centered sums keep the fit stable when stalls are large relative to
  // their spread.
  const double n = static_cast<double>(points.size());
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (const StallPoint& p : points) {
    mean_x += ToSeconds(p.s_period);
    mean_y += ToSeconds(p.t_exec);
  }
  mean_x /= n;
  mean_y /= n;

  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (const StallPoint& p : points) {
    const double dx = ToSeconds(p.s_period) - mean_x;
    const double dy = ToSeconds(p.t_exec) - mean_y;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) {
    return absl::InvalidArgumentError(
        "degenerate fit: every point has the same s_period");
  }

  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept_s = mean_y - fit.slope * mean_x;
  if (syy == 0.0) {
    fit.r_squared = 1.0;
  } else {
    double ss_res = 0.0;
    for (const StallPoint& p : points) {
      const double r = ToSeconds(p.t_exec) -
                       (fit.slope * ToSeconds(p.s_period) + fit.intercept_s);
      ss_res += r * r;
    }
    fit.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  }
  return fit;
}

}  // namespace stallsim::metrics
