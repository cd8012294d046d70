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

#include "stallsim/baselines.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "stallsim/metrics.h"
#include "stallsim/simulator.h"

namespace stallsim::baselines {
namespace {

absl::StatusOr<Micros> MeanElapsed(const TraceLog& trace, size_t task) {
  const std::vector<PeriodRecord>& records = trace.periods[task];
  if (records.empty()) {
    return absl::InternalError("profiling run produced no periods");
  }
  Micros total{0};
  for (const PeriodRecord& r : records) total += r.elapsed;
  return total / static_cast<int64_t>(records.size());
}

ScenarioConfig ProfilingScenario(const ScenarioConfig& config) {
  ScenarioConfig profiling = config;
  for (TaskSpec& t : profiling.tasks) t.demand_jitter = 0.0;
  profiling.long_stall.probability_per_period = 0.0;
  profiling.horizon_periods = kOfflineProfilePeriods;
  return profiling;
}

}  // namespace

AllocatorDecision GreedyDecision(const TaskSpec& task, int64_t demand_mb,
                                 int64_t current_limit_mb) {
  const int64_t target = std::max(demand_mb, task.working_set.min_mb);
  return AllocatorDecision{.delta_mb = target - current_limit_mb};
}

absl::Status GreedyAllocator::Reset(const ScenarioConfig&) {
  return absl::OkStatus();
}

AllocatorDecision GreedyAllocator::OnPeriodStart(const TaskSpec& task,
                                                 const JobStart& job) {
  return GreedyDecision(task, job.demand_mb, job.limit_mb);
}

AllocatorDecision GreedyAllocator::OnInterval(const TaskSpec& task,
                                              const IntervalObservation& obs) {
  return GreedyDecision(task, obs.demand_mb, obs.limit_mb);
}

absl::Status StaticAllocator::Reset(const ScenarioConfig& config) {
  if (profile_.static_limit_mb.size() != config.tasks.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "static profile covers ", profile_.static_limit_mb.size(),
        " tasks, scenario has ", config.tasks.size()));
  }
  return absl::OkStatus();
}

AllocatorDecision StaticAllocator::OnPeriodStart(const TaskSpec&,
                                                 const JobStart& job) {
  return {.delta_mb = profile_.static_limit_mb[job.task] - job.limit_mb};
}

AllocatorDecision StaticAllocator::OnInterval(const TaskSpec&,
                                              const IntervalObservation& obs) {
  return {.delta_mb = profile_.static_limit_mb[obs.task] - obs.limit_mb};
}

absl::StatusOr<Micros> MeanElapsedAtLimit(const ScenarioConfig& config,
                                          size_t task, int64_t limit_mb) {
  OfflineProfile profile;
  profile.static_limit_mb.resize(config.tasks.size());
  for (size_t i = 0; i < config.tasks.size(); ++i) {
    profile.static_limit_mb[i] = config.tasks[i].working_set.avg_mb;
  }
  profile.static_limit_mb[task] = limit_mb;
  StaticAllocator allocator(profile);
  absl::StatusOr<TraceLog> trace =
      RunScenario(config, allocator, RunOptions{.record_intervals = false});
  if (!trace.ok()) return trace.status();
  return MeanElapsed(*trace, task);
}

absl::StatusOr<int64_t> OfflineStaticLimit(const ScenarioConfig& config,
                                           size_t task) {
  if (task >= config.tasks.size() || !config.tasks[task].soft_rt()) {
    return absl::InvalidArgumentError(
        absl::StrCat("task ", task, " is not a soft RT task"));
  }
  const TaskSpec& spec = config.tasks[task];
  if (spec.t_bcet > spec.deadline) {
    return absl::FailedPreconditionError(absl::StrCat(
        "task '", spec.name, "' is infeasible: BCET exceeds the deadline"));
  }
  const ScenarioConfig profiling = ProfilingScenario(config);
  auto feasible = [&](int64_t limit) -> absl::StatusOr<bool> {
    absl::StatusOr<Micros> mean = MeanElapsedAtLimit(profiling, task, limit);
    if (!mean.ok()) return mean.status();
    return *mean <= spec.deadline;
  };

  int64_t lo = spec.working_set.min_mb;
  int64_t hi = spec.working_set.max_mb;
  absl::StatusOr<bool> at_max = feasible(hi);
  if (!at_max.ok()) return at_max.status();
  if (!*at_max) {
    return absl::FailedPreconditionError(
        absl::StrCat("task '", spec.name,
                     "' misses its deadline even at its maximum working set of ",
                     hi, " MB"));
  }
  absl::StatusOr<bool> at_min = feasible(lo);
  if (!at_min.ok()) return at_min.status();
  if (*at_min) return lo;
  // Invariant: lo infeasible, hi feasible.
  while (hi - lo > 1) {
    const int64_t mid = lo + (hi - lo) / 2;
    absl::StatusOr<bool> ok = feasible(mid);
    if (!ok.ok()) return ok.status();
    (*ok ? hi : lo) = mid;
  }
  return hi;
}

absl::StatusOr<OfflineProfile> ProfileOffline(const ScenarioConfig& config) {
  OfflineProfile profile;
  profile.static_limit_mb.assign(config.tasks.size(), 0);
  for (size_t i = 0; i < config.tasks.size(); ++i) {
    if (!config.tasks[i].soft_rt()) continue;
    absl::StatusOr<int64_t> limit = OfflineStaticLimit(config, i);
    if (!limit.ok()) return limit.status();
    profile.static_limit_mb[i] = *limit;
  }
  return profile;
}

absl::Status TmoConfig::Validate() const {
  if (psi_threshold <= 0.0) {
    return absl::InvalidArgumentError("psi_threshold must be positive");
  }
  if (window <= Micros::zero()) {
    return absl::InvalidArgumentError("window must be positive");
  }
  if (step_mb <= 0) {
    return absl::InvalidArgumentError("step_mb must be positive");
  }
  return absl::OkStatus();
}

AllocatorDecision TmoDecision(const TmoConfig& config, double percentage) {
  if (percentage < config.psi_threshold) return {.delta_mb = -config.step_mb};
  if (percentage > config.psi_threshold) return {.delta_mb = config.step_mb};
  return {};
}

absl::Status TmoAllocator::Reset(const ScenarioConfig& config) {
  if (absl::Status s = config_.Validate(); !s.ok()) return s;
  l_intv_ = config.l_intv;
  window_intervals_ = static_cast<size_t>(
      std::max<int64_t>(1, config_.window / config.l_intv));
  windows_.assign(config.tasks.size(), Window{});
  return absl::OkStatus();
}

AllocatorDecision TmoAllocator::OnPeriodStart(const TaskSpec&,
                                              const JobStart&) {
  return {};
}

AllocatorDecision TmoAllocator::OnInterval(const TaskSpec&,
                                           const IntervalObservation& obs) {
  Window& w = windows_[obs.task];
  const Micros stall = metrics::IntervalStall(obs.sample);
  w.stalls.push_back(stall);
  w.sum += stall;
  if (w.stalls.size() > window_intervals_) {
    w.sum -= w.stalls.front();
    w.stalls.pop_front();
  }
  const Micros span = l_intv_ * static_cast<int64_t>(w.stalls.size());
  absl::StatusOr<double> pct = metrics::StallPercentage(w.sum, span);
  return TmoDecision(config_, pct.ok() ? *pct : 0.0);
}

std::vector<double> DefaultTmoGrid() {
  std::vector<double> grid;
  for (double t = 0.1; t <= 50.0 + 1e-9; t *= 1.25) grid.push_back(t);
  return grid;
}

absl::StatusOr<TmoConfig> TmoHighSearch(const ScenarioConfig& config,
                                        size_t task,
                                        const std::vector<double>& grid,
                                        TmoConfig base) {
  if (grid.empty()) return absl::InvalidArgumentError("threshold grid is empty");
  if (task >= config.tasks.size() || !config.tasks[task].soft_rt()) {
    return absl::InvalidArgumentError(
        absl::StrCat("task ", task, " is not a soft RT task"));
  }
  std::optional<double> best;
  for (double threshold : grid) {
    TmoConfig candidate = base;
    candidate.psi_threshold = threshold;
    TmoAllocator allocator(candidate);
    absl::StatusOr<TraceLog> trace =
        RunScenario(config, allocator, RunOptions{.record_intervals = false});
    if (!trace.ok()) return trace.status();
    absl::StatusOr<Micros> mean = MeanElapsed(*trace, task);
    if (!mean.ok()) return mean.status();
    if (*mean <= config.tasks[task].deadline &&
        (!best.has_value() || threshold > *best)) {
      best = threshold;
    }
  }
  base.psi_threshold = best.value_or(*std::min_element(grid.begin(), grid.end()));
  return base;
}

}  // namespace stallsim::baselines
