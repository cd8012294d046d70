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

#ifndef STALLSIM_METRICS_H_
#define STALLSIM_METRICS_H_

#include <cstdint>
#include <span>

#include "absl/status/statusor.h"
#include "stallsim/units.h"

namespace stallsim::metrics {

// Memory and I/O stall observed for one task group during one monitoring
// interval. Both fields are absolute stall time, bounded by the interval
// length.
struct StallSample {
  int64_t interval_index = 0;
  Micros s_mem{0};
  Micros s_io{0};

  friend bool operator==(const StallSample&, const StallSample&) = default;
};

struct PeriodStallSummary {
  int64_t period_index = 0;
  Micros s_period{0};
  int64_t sample_count = 0;
};

// Least-squares fit of job execution time against per-period stall,
// t_exec = slope * s_period + intercept.
struct LinearFit {
  double slope = 0.0;
  double intercept_s = 0.0;
  double r_squared = 0.0;
};

struct StallPoint {
  Micros s_period{0};
  Micros t_exec{0};
};

// Per-interval stall: memory and I/O stalls overlap, so the larger of the two
// bounds the time the task could not make progress.
Micros IntervalStall(const StallSample& sample);

// Sums IntervalStall over one period's samples. Rejects repeated or
// decreasing interval indices.
absl::StatusOr<PeriodStallSummary> AccumulatePeriod(
    std::span<const StallSample> samples, int64_t period_index = 0);

// PSI-style percentage: share of `window` spent stalled, in percent.
absl::StatusOr<double> StallPercentage(Micros total_stall, Micros window);

// Default reporting window for StallPercentage.
inline constexpr Micros kDefaultPercentageWindow = std::chrono::seconds(10);

// Ordinary least squares over (s_period, t_exec). Needs at least two points
// with distinct s_period. r_squared is 1 when t_exec has no variance.
absl::StatusOr<LinearFit> FitStallLinearity(std::span<const StallPoint> points);

}  // namespace stallsim::metrics

#endif  // STALLSIM_METRICS_H_
