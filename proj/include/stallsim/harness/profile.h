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


#ifndef STALLSIM_HARNESS_PROFILE_H_
#define STALLSIM_HARNESS_PROFILE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "stallsim/harness/analysis.h"
#include "stallsim/metrics.h"
#include "stallsim/scenario.h"

namespace stallsim::harness {

struct ProfileOptions {
  int64_t periods = 300;
  // Static limit for the fit and separation runs; the task's average working
  // set when unset.
  std::optional<int64_t> fixed_limit_mb;
  std::vector<double> m_grid = {50, 55, 60, 65, 70, 75, 80, 85, 90, 95, 100};
  std::vector<double> n_grid = {50, 55, 60, 65, 70, 75, 80, 85, 90, 95};
  // A cell separates when it flags at least this share of injected periods
  // and less than max_normal_rate of normal ones.
  double min_injected_rate = 0.95;
  double max_normal_rate = 0.05;
  double histogram_n = 90.0;
};

struct SeparationCell {
  double m = 0.0;
  double n = 0.0;
  DetectionCounts counts;
  bool separates = false;
};

struct TaskProfile {
  std::string task;
  Micros t_bcet_measured{0};
  int64_t fixed_limit_mb = 0;
  std::vector<metrics::StallPoint> points;
  metrics::LinearFit fit;
  std::vector<SeparationCell> cells;
  SeverityHistogram histogram;
};

// Measures BCET with every working set resident, fits t_exec against
// s_period over a fixed-limit run (long-stall periods excluded), and grades
// each (m, n) cell on the same run. Without long-stall injection every cell
// has zero injected periods and none separates.
absl::StatusOr<TaskProfile> ProfileTask(const ScenarioConfig& scenario,
                                        size_t task,
                                        const ProfileOptions& options = {});

std::string RenderProfileJson(const TaskProfile& profile);
// One row per (m, n) cell.
std::string RenderSeparationCsv(const TaskProfile& profile);

inline constexpr char kSeparationHeader[] =
    "m_pct,n_pct,injected,injected_flagged,normal,normal_flagged,separates";

}  // namespace stallsim::harness

#endif  // STALLSIM_HARNESS_PROFILE_H_
