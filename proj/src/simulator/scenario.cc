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

#include "stallsim/scenario.h"

#include <bit>

#include "absl/strings/str_cat.h"

namespace stallsim {

absl::Status TaskSpec::Validate() const {
  const std::string who = absl::StrCat("task '", name, "': ");
  if (name.empty()) return absl::InvalidArgumentError("task name is empty");
  const WorkingSet& ws = working_set;
  if (ws.min_mb < 0 || ws.min_mb > ws.avg_mb || ws.avg_mb > ws.max_mb) {
    return absl::InvalidArgumentError(
        absl::StrCat(who, "working set needs 0 <= min <= avg <= max, got ",
                     ws.min_mb, "/", ws.avg_mb, "/", ws.max_mb));
  }
  if (demand_jitter < 0.0 || demand_jitter > 1.0) {
    return absl::InvalidArgumentError(
        absl::StrCat(who, "demand_jitter must lie in [0, 1]"));
  }
  if (touch_rate < 0.0) {
    return absl::InvalidArgumentError(
        absl::StrCat(who, "touch_rate must be non-negative"));
  }
  if (dirty_fraction < 0.0 || dirty_fraction > 1.0) {
    return absl::InvalidArgumentError(
        absl::StrCat(who, "dirty_fraction must lie in [0, 1]"));
  }
  if (soft_rt()) {
    if (t_bcet <= Micros::zero() || t_bcet >= deadline || deadline > period) {
      return absl::InvalidArgumentError(absl::StrCat(
          who, "soft RT timing needs 0 < t_bcet < deadline <= period, got ",
          t_bcet.count(), "/", deadline.count(), "/", period.count(), "us"));
    }
  } else if (work_unit <= Micros::zero()) {
    return absl::InvalidArgumentError(
        absl::StrCat(who, "work_unit must be positive"));
  }
  return absl::OkStatus();
}

absl::Status SsdProfile::Validate() const {
  if (read_bw <= 0.0 || write_bw <= 0.0) {
    return absl::InvalidArgumentError(
        absl::StrCat("ssd '", name, "': bandwidths must be positive"));
  }
  if (page_size <= 0 || !std::has_single_bit(static_cast<uint64_t>(page_size))) {
    return absl::InvalidArgumentError(absl::StrCat(
        "ssd '", name, "': page_size ", page_size, " is not a power of two"));
  }
  if (per_op_latency < Micros::zero()) {
    return absl::InvalidArgumentError(
        absl::StrCat("ssd '", name, "': per_op_latency is negative"));
  }
  return absl::OkStatus();
}

size_t ScenarioConfig::primary_task() const {
  for (size_t i = 0; i < tasks.size(); ++i) {
    if (tasks[i].soft_rt()) return i;
  }
  return 0;
}

bool ScenarioConfig::uncontended() const {
  int64_t peak = 0;
  for (const TaskSpec& t : tasks) peak += t.working_set.max_mb;
  return total_memory_mb >= peak;
}

absl::Status ScenarioConfig::Validate() const {
  if (total_memory_mb <= 0) {
    return absl::InvalidArgumentError("total_memory_mb must be positive");
  }
  if (l_intv <= Micros::zero()) {
    return absl::InvalidArgumentError("l_intv must be positive");
  }
  if (base_unit_x_mb <= 0.0) {
    return absl::InvalidArgumentError("base_unit_x_mb must be positive");
  }
  if (horizon_periods <= 0) {
    return absl::InvalidArgumentError("horizon_periods must be positive");
  }
  if (absl::Status s = ssd.Validate(); !s.ok()) return s;

  int soft = 0;
  int non_rt = 0;
  int64_t minima = 0;
  for (const TaskSpec& t : tasks) {
    if (absl::Status s = t.Validate(); !s.ok()) return s;
    minima += t.working_set.min_mb;
    if (t.soft_rt()) {
      ++soft;
      if (t.period.count() % l_intv.count() != 0) {
        return absl::InvalidArgumentError(
            absl::StrCat("task '", t.name, "': l_intv ", l_intv.count(),
                         "us does not divide period ", t.period.count(), "us"));
      }
    } else {
      ++non_rt;
    }
  }
  if (soft == 0) {
    return absl::InvalidArgumentError("scenario needs a soft RT task");
  }
  if (non_rt > 1) {
    return absl::InvalidArgumentError("scenario allows at most one non-RT task");
  }
  if (minima > total_memory_mb) {
    return absl::InvalidArgumentError(
        absl::StrCat("working-set minima (", minima, " MB) exceed total memory (",
                     total_memory_mb, " MB)"));
  }
  const LongStallConfig& ls = long_stall;
  if (ls.probability_per_period < 0.0 || ls.probability_per_period > 1.0) {
    return absl::InvalidArgumentError(
        "long_stall.probability_per_period must lie in [0, 1]");
  }
  if (ls.min_duration < Micros::zero() || ls.min_duration > ls.max_duration) {
    return absl::InvalidArgumentError(
        "long_stall duration range needs 0 <= min <= max");
  }
  const StallAttribution& a = stall_attribution;
  if (a.mem_fraction < 0.0 || a.mem_fraction > 1.0 || a.io_fraction < 0.0 ||
      a.io_fraction > 1.0 || (a.mem_fraction == 0.0 && a.io_fraction == 0.0)) {
    return absl::InvalidArgumentError(
        "stall attribution fractions must lie in [0, 1], not both zero");
  }
  if (t_drop < Micros::zero()) {
    return absl::InvalidArgumentError("t_drop must be non-negative");
  }
  return absl::OkStatus();
}

}  // namespace stallsim
