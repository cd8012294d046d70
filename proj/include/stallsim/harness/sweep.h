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


#ifndef STALLSIM_HARNESS_SWEEP_H_
#define STALLSIM_HARNESS_SWEEP_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "stallsim/scenario.h"
#include "stallsim/units.h"

namespace stallsim::harness {

inline constexpr char kSweepHeader[] =
    "threshold_pct,hit_ratio,nonrt_throughput,mean_elapsed_us";

struct SweepOptions {
  int64_t repetitions = 1;
  int64_t step_mb = 1;
  int jobs = 1;
};

struct SweepRow {
  double threshold_pct = 0.0;
  double hit_ratio = 0.0;
  double nonrt_throughput = 0.0;
  MicrosF mean_elapsed{0.0};
};

// Runs a static-threshold PSI allocator at each grid point. The stall
// percentage is taken over a window of one period of `task`; below the
// threshold the limit shrinks by step_mb per interval, above it grows.
// Results average over repetitions with seeds scenario.seed + r.
absl::StatusOr<std::vector<SweepRow>> SweepThreshold(
    const ScenarioConfig& scenario, size_t task, std::span<const double> grid,
    const SweepOptions& options = {});

std::string RenderSweepCsv(std::span<const SweepRow> rows);

}  // namespace stallsim::harness

#endif  // STALLSIM_HARNESS_SWEEP_H_
