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


#include "stallsim/harness/sweep.h"

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "stallsim/baselines.h"
#include "stallsim/harness/runner.h"
#include "stallsim/simulator.h"

namespace stallsim::harness {

absl::StatusOr<std::vector<SweepRow>> SweepThreshold(
    const ScenarioConfig& scenario, size_t task, std::span<const double> grid,
    const SweepOptions& options) {
  if (grid.empty()) return absl::InvalidArgumentError("empty threshold grid");
  if (options.repetitions < 1) {
    return absl::InvalidArgumentError("repetitions must be at least 1");
  }
  if (absl::Status s = scenario.Validate(); !s.ok()) return s;
  if (task >= scenario.tasks.size() || !scenario.tasks[task].soft_rt()) {
    return absl::InvalidArgumentError(
        absl::StrCat("task ", task, " is not a soft RT task"));
  }
  const size_t reps = static_cast<size_t>(options.repetitions);
  std::vector<SweepRow> partial(grid.size() * reps);
  absl::Status status = ParallelFor(
      partial.size(), options.jobs, [&](size_t i) -> absl::Status {
        const double threshold = grid[i / reps];
        ScenarioConfig sc = scenario;
        sc.seed = scenario.seed + i % reps;
        baselines::TmoConfig tmo{.psi_threshold = threshold,
                                 .window = sc.tasks[task].period,
                                 .step_mb = options.step_mb};
        if (absl::Status s = tmo.Validate(); !s.ok()) return s;
        baselines::TmoAllocator allocator(tmo, "static-threshold");
        absl::StatusOr<TraceLog> trace = RunScenario(sc, allocator);
        if (!trace.ok()) return trace.status();
        const std::vector<PeriodRecord>& periods = trace->periods[task];
        SweepRow& row = partial[i];
        row.threshold_pct = threshold;
        double met = 0.0;
        double elapsed = 0.0;
        for (const PeriodRecord& p : periods) {
          met += p.deadline_met ? 1.0 : 0.0;
          elapsed += static_cast<double>(p.elapsed.count());
        }
        const double n = static_cast<double>(periods.size());
        row.hit_ratio = met / n;
        row.mean_elapsed = MicrosF(elapsed / n);
        row.nonrt_throughput = NonRtThroughput(*trace);
        return absl::OkStatus();
      });
  if (!status.ok()) return status;

  std::vector<SweepRow> rows;
  const double count = static_cast<double>(reps);
  for (size_t g = 0; g < grid.size(); ++g) {
    SweepRow row{.threshold_pct = grid[g]};
    for (size_t r = 0; r < reps; ++r) {
      const SweepRow& p = partial[g * reps + r];
      row.hit_ratio += p.hit_ratio;
      row.nonrt_throughput += p.nonrt_throughput;
      row.mean_elapsed += p.mean_elapsed;
    }
    row.hit_ratio /= count;
    row.nonrt_throughput /= count;
    row.mean_elapsed /= count;
    rows.push_back(row);
  }
  return rows;
}

std::string RenderSweepCsv(std::span<const SweepRow> rows) {
  std::string out = absl::StrCat(kSweepHeader, "\n");
  for (const SweepRow& r : rows) {
    absl::StrAppendFormat(&out, "%g,%.6f,%.6f,%.1f\n", r.threshold_pct,
                          r.hit_ratio, r.nonrt_throughput,
                          r.mean_elapsed.count());
  }
  return out;
}

}  // namespace stallsim::harness
