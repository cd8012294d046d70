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

#include "stallsim/sara.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"

namespace stallsim::sara {

absl::Status SaraConfig::Validate() const {
  if (base_unit_x_mb <= 0.0) {
    return absl::InvalidArgumentError("base_unit_x_mb must be positive");
  }
  if (l_intv <= Micros::zero()) {
    return absl::InvalidArgumentError("l_intv must be positive");
  }
  if (long_stall_m <= 0.0 || long_stall_m > 100.0 || long_stall_n <= 0.0 ||
      long_stall_n > 100.0) {
    return absl::InvalidArgumentError(
        absl::StrCat("long-stall m and n must lie in (0, 100], got m=",
                     long_stall_m, " n=", long_stall_n));
  }
  return absl::OkStatus();
}

Micros IdealPeriodStall(Micros deadline, Micros t_bcet, Micros t_wait) {
  return deadline - t_bcet - t_wait;
}

absl::StatusOr<MicrosF> IdealIntervalStall(Micros s_ideal_period,
                                           Micros accumulated,
                                           int64_t n_remain) {
  if (n_remain < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("n_remain must be at least 1, got ", n_remain));
  }
  return MicrosF(static_cast<double>((s_ideal_period - accumulated).count()) /
                 static_cast<double>(n_remain));
}

double MemoryAdjustment(double base_unit_x_mb, Micros s_intv,
                        MicrosF s_ideal_intv, Micros l_intv) {
  return base_unit_x_mb *
         (static_cast<double>(s_intv.count()) - s_ideal_intv.count()) /
         static_cast<double>(l_intv.count());
}

bool IsSevere(Micros s_intv, Micros l_intv, double n_percent) {
  return static_cast<double>(s_intv.count()) * 100.0 >
         n_percent * static_cast<double>(l_intv.count());
}

bool IsLongStall(int64_t severe_count, int64_t total_count, double m_percent) {
  if (total_count < 1) return false;
  return static_cast<double>(severe_count) * 100.0 >=
         m_percent * static_cast<double>(total_count);
}

bool ShouldDrop(const SaraJobState& state, const SaraConfig& config) {
  return config.drop_enabled &&
         state.s_ideal_period - state.accumulated_stall < Micros::zero() &&
         IsLongStall(state.severe_interval_count, state.total_interval_count,
                     config.long_stall_m);
}

SaraJobState OnPeriodStart(const TaskSpec& task, Micros t_wait,
                           const SaraConfig& config, int64_t current_limit_mb) {
  SaraJobState state;
  state.s_ideal_period = IdealPeriodStall(task.deadline, task.t_bcet, t_wait);
  // Intervals between the actual start and the deadline.
  state.n_remain_intv =
      std::max<int64_t>(0, (task.deadline - t_wait) / config.l_intv);
  state.current_limit_mb = current_limit_mb;
  return state;
}

std::pair<SaraJobState, AllocatorDecision> OnInterval(
    const SaraJobState& state, const metrics::StallSample& sample,
    const SaraConfig& config, const TaskSpec& task) {
  SaraJobState next = state;
  AllocatorDecision decision;
  if (state.dropped) return {next, decision};

  const Micros s_intv = metrics::IntervalStall(sample);
  next.accumulated_stall += s_intv;
  ++next.total_interval_count;
  if (IsSevere(s_intv, config.l_intv, config.long_stall_n)) {
    ++next.severe_interval_count;
  }

  // Past the deadline the whole remaining budget (now negative) is demanded
  // from a single interval.
  const int64_t divisor = std::max<int64_t>(1, next.n_remain_intv);
  const MicrosF ideal =
      *IdealIntervalStall(next.s_ideal_period, next.accumulated_stall, divisor);
  next.residual_mb +=
      MemoryAdjustment(config.base_unit_x_mb, s_intv, ideal, config.l_intv);
  next.n_remain_intv = std::max<int64_t>(0, next.n_remain_intv - 1);

  const WorkingSet& ws = task.working_set;
  if (ShouldDrop(next, config)) {
    decision.drop_job = true;
    decision.delta_mb = ws.min_mb - next.current_limit_mb;
    next.current_limit_mb = ws.min_mb;
    next.residual_mb = 0.0;
    next.dropped = true;
    return {next, decision};
  }

  if (std::abs(next.residual_mb) >= 1.0) {
    const int64_t step = static_cast<int64_t>(std::trunc(next.residual_mb));
    const int64_t target =
        std::clamp(next.current_limit_mb + step, ws.min_mb, ws.max_mb);
    next.residual_mb -= static_cast<double>(step);
    if (target != next.current_limit_mb + step) next.residual_mb = 0.0;
    decision.delta_mb = target - next.current_limit_mb;
    next.current_limit_mb = target;
  }
  return {next, decision};
}

absl::Status SaraAllocator::Reset(const ScenarioConfig& config) {
  config_ = SaraConfig{
      .base_unit_x_mb = options_.base_unit_x_mb.value_or(config.base_unit_x_mb),
      .l_intv = config.l_intv,
      .long_stall_m = options_.long_stall_m,
      .long_stall_n = options_.long_stall_n,
      .drop_enabled = options_.drop_enabled};
  if (absl::Status s = config_.Validate(); !s.ok()) return s;
  states_.assign(config.tasks.size(), SaraJobState{});
  limit_before_drop_.assign(config.tasks.size(), std::nullopt);
  return absl::OkStatus();
}

AllocatorDecision SaraAllocator::OnPeriodStart(const TaskSpec& task,
                                               const JobStart& job) {
  AllocatorDecision decision;
  int64_t limit = job.limit_mb;
  if (limit_before_drop_[job.task].has_value()) {
    decision.delta_mb = *limit_before_drop_[job.task] - limit;
    limit = *limit_before_drop_[job.task];
    limit_before_drop_[job.task].reset();
  }
  states_[job.task] = sara::OnPeriodStart(task, job.t_wait, config_, limit);
  return decision;
}

AllocatorDecision SaraAllocator::OnInterval(const TaskSpec& task,
                                            const IntervalObservation& obs) {
  if (!obs.job_sample.has_value()) return {};
  SaraJobState& state = states_[obs.task];
  if (state.dropped) return {};
  state.current_limit_mb = obs.limit_mb;
  auto [next, decision] = sara::OnInterval(state, *obs.job_sample, config_, task);
  if (decision.drop_job) limit_before_drop_[obs.task] = obs.limit_mb;
  state = next;
  return decision;
}

}  // namespace stallsim::sara
