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


#include "stallsim/harness/profile.h"

#include <algorithm>

#include "absl/strings/str_cat.h"
#include "nlohmann/json.hpp"
#include "stallsim/baselines.h"
#include "stallsim/simulator.h"

namespace stallsim::harness {
namespace {

// Periods simulated for the BCET measurement.
constexpr int64_t kBcetPeriods = 20;

absl::StatusOr<TraceLog> RunStatic(const ScenarioConfig& scenario,
                                   std::vector<int64_t> limits) {
  baselines::StaticAllocator allocator(
      baselines::OfflineProfile{std::move(limits)}, "profile");
  return RunScenario(scenario, allocator);
}

}  // namespace

absl::StatusOr<TaskProfile> ProfileTask(const ScenarioConfig& scenario,
                                        size_t task,
                                        const ProfileOptions& options) {
  if (absl::Status s = scenario.Validate(); !s.ok()) return s;
  if (task >= scenario.tasks.size() || !scenario.tasks[task].soft_rt()) {
    return absl::InvalidArgumentError(
        absl::StrCat("task ", task, " is not a soft RT task"));
  }
  if (options.periods < 2) {
    return absl::InvalidArgumentError("profiling needs at least 2 periods");
  }
  const TaskSpec& spec = scenario.tasks[task];
  TaskProfile profile;
  profile.task = spec.name;

  {
    ScenarioConfig roomy = scenario;
    roomy.total_memory_mb = 0;
    for (const TaskSpec& t : roomy.tasks) {
      roomy.total_memory_mb += t.working_set.max_mb;
    }
    roomy.long_stall.probability_per_period = 0.0;
    roomy.horizon_periods = std::min(options.periods, kBcetPeriods);
    std::vector<int64_t> limits;
    for (const TaskSpec& t : roomy.tasks) limits.push_back(t.working_set.max_mb);
    absl::StatusOr<TraceLog> trace = RunStatic(roomy, std::move(limits));
    if (!trace.ok()) return trace.status();
    const std::vector<PeriodRecord>& periods = trace->periods[task];
    profile.t_bcet_measured =
        std::min_element(periods.begin(), periods.end(),
                         [](const PeriodRecord& a, const PeriodRecord& b) {
                           return a.t_exec < b.t_exec;
                         })
            ->t_exec;
  }

  ScenarioConfig fixed = scenario;
  fixed.horizon_periods = options.periods;
  profile.fixed_limit_mb =
      options.fixed_limit_mb.value_or(spec.working_set.avg_mb);
  std::vector<int64_t> limits;
  for (size_t i = 0; i < fixed.tasks.size(); ++i) {
    limits.push_back(i == task ? profile.fixed_limit_mb
                               : fixed.tasks[i].working_set.avg_mb);
  }
  absl::StatusOr<TraceLog> trace = RunStatic(fixed, std::move(limits));
  if (!trace.ok()) return trace.status();

  for (const PeriodRecord& p : trace->periods[task]) {
    if (p.long_stall) continue;
    profile.points.push_back({.s_period = p.s_period, .t_exec = p.t_exec});
  }
  absl::StatusOr<metrics::LinearFit> fit =
      metrics::FitStallLinearity(profile.points);
  if (!fit.ok()) return fit.status();
  profile.fit = *fit;

  for (double m : options.m_grid) {
    for (double n : options.n_grid) {
      SeparationCell cell{.m = m, .n = n, .counts = {}, .separates = false};
      cell.counts = EvaluateDetection(*trace, fixed, task, m, n);
      cell.separates = cell.counts.injected > 0 && cell.counts.normal > 0 &&
                       cell.counts.injected_rate() >= options.min_injected_rate &&
                       cell.counts.normal_rate() < options.max_normal_rate;
      profile.cells.push_back(cell);
    }
  }
  profile.histogram =
      SevereHistogram(*trace, fixed, task, options.histogram_n);
  return profile;
}

std::string RenderProfileJson(const TaskProfile& profile) {
  nlohmann::ordered_json j;
  j["task"] = profile.task;
  j["t_bcet_measured_us"] = profile.t_bcet_measured.count();
  j["fixed_limit_mb"] = profile.fixed_limit_mb;
  j["fit"] = {{"slope", profile.fit.slope},
              {"intercept_s", profile.fit.intercept_s},
              {"r_squared", profile.fit.r_squared},
              {"points", profile.points.size()}};
  nlohmann::ordered_json separating = nlohmann::ordered_json::array();
  for (const SeparationCell& c : profile.cells) {
    if (c.separates) separating.push_back({c.m, c.n});
  }
  j["separating_cells"] = separating;
  j["histogram"] = {{"buckets_pct", {0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100}},
                    {"injected", profile.histogram.injected},
                    {"normal", profile.histogram.normal}};
  return j.dump(2) + "\n";
}

std::string RenderSeparationCsv(const TaskProfile& profile) {
  std::string out = absl::StrCat(kSeparationHeader, "\n");
  for (const SeparationCell& c : profile.cells) {
    absl::StrAppend(&out, c.m, ",", c.n, ",", c.counts.injected, ",",
                    c.counts.injected_flagged, ",", c.counts.normal, ",",
                    c.counts.normal_flagged, ",", c.separates ? 1 : 0, "\n");
  }
  return out;
}

}  // namespace stallsim::harness
