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

#ifndef STALLSIM_BASELINES_H_
#define STALLSIM_BASELINES_H_

#include <cstdint>
#include <deque>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "stallsim/allocator.h"
#include "stallsim/scenario.h"
#include "stallsim/units.h"

namespace stallsim::baselines {

// Greedy: the soft RT limit follows the task's current usage.
AllocatorDecision GreedyDecision(const TaskSpec& task, int64_t demand_mb,
                                 int64_t current_limit_mb);

class GreedyAllocator : public Allocator {
 public:
  std::string_view Name() const override { return "greedy"; }
  absl::Status Reset(const ScenarioConfig& config) override;
  AllocatorDecision OnPeriodStart(const TaskSpec& task,
                                  const JobStart& job) override;
  AllocatorDecision OnInterval(const TaskSpec& task,
                               const IntervalObservation& obs) override;
};

// Static per-task limits. Index by task; entries for non-RT tasks are unused.
struct OfflineProfile {
  std::vector<int64_t> static_limit_mb;
};

class StaticAllocator : public Allocator {
 public:
  explicit StaticAllocator(OfflineProfile profile,
                           std::string_view name = "offline")
      : profile_(std::move(profile)), name_(name) {}

  std::string_view Name() const override { return name_; }
  absl::Status Reset(const ScenarioConfig& config) override;
  AllocatorDecision OnPeriodStart(const TaskSpec& task,
                                  const JobStart& job) override;
  AllocatorDecision OnInterval(const TaskSpec& task,
                               const IntervalObservation& obs) override;

 private:
  OfflineProfile profile_;
  std::string name_;
};

// Number of periods simulated per candidate limit during offline profiling.
inline constexpr int64_t kOfflineProfilePeriods = 100;

// Smallest static limit for soft RT task `task` whose mean elapsed time over a
// jitter-free, long-stall-free profiling run is within the deadline, found by
// bisection at 1 MB resolution. Other soft RT tasks are held at their average
// working set. Fails when even the maximum working set misses the deadline.
absl::StatusOr<int64_t> OfflineStaticLimit(const ScenarioConfig& config,
                                           size_t task);

// OfflineStaticLimit for every soft RT task.
absl::StatusOr<OfflineProfile> ProfileOffline(const ScenarioConfig& config);

// Mean elapsed time of `task` over `config` with a fixed limit.
absl::StatusOr<Micros> MeanElapsedAtLimit(const ScenarioConfig& config,
                                          size_t task, int64_t limit_mb);

struct TmoConfig {
  // Percent of the window.
  double psi_threshold = 0.1;
  Micros window = std::chrono::seconds(10);
  int64_t step_mb = 1;

  absl::Status Validate() const;
};

// Step the limit toward holding the windowed stall percentage at the
// threshold. Never drops jobs.
AllocatorDecision TmoDecision(const TmoConfig& config, double percentage);

class TmoAllocator : public Allocator {
 public:
  explicit TmoAllocator(TmoConfig config, std::string_view name = "tmo")
      : config_(config), name_(name) {}

  std::string_view Name() const override { return name_; }
  absl::Status Reset(const ScenarioConfig& config) override;
  AllocatorDecision OnPeriodStart(const TaskSpec& task,
                                  const JobStart& job) override;
  AllocatorDecision OnInterval(const TaskSpec& task,
                               const IntervalObservation& obs) override;

  const TmoConfig& config() const { return config_; }

 private:
  struct Window {
    std::deque<Micros> stalls;
    Micros sum{0};
  };

  TmoConfig config_;
  std::string name_;
  Micros l_intv_{0};
  size_t window_intervals_ = 0;
  std::vector<Window> windows_;
};

// Candidate thresholds from 0.1% to 50%, each 1.25x the previous.
std::vector<double> DefaultTmoGrid();

// Highest grid threshold whose run keeps the mean elapsed time of `task`
// within its deadline. Falls back to the lowest candidate when none does.
absl::StatusOr<TmoConfig> TmoHighSearch(const ScenarioConfig& config,
                                        size_t task,
                                        const std::vector<double>& grid,
                                        TmoConfig base = {});

}  // namespace stallsim::baselines

#endif  // STALLSIM_BASELINES_H_
