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

#ifndef STALLSIM_SARA_H_
#define STALLSIM_SARA_H_

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "stallsim/allocator.h"
#include "stallsim/metrics.h"
#include "stallsim/scenario.h"
#include "stallsim/units.h"

namespace stallsim::sara {

struct SaraConfig {
  double base_unit_x_mb = 1.0;
  Micros l_intv{5000};
  // A period is a long stall when at least m% of its intervals stalled for
  // more than n% of l_intv.
  double long_stall_m = 80.0;
  double long_stall_n = 90.0;
  bool drop_enabled = true;

  absl::Status Validate() const;
};

// Controller state for the job currently running on one soft RT task.
struct SaraJobState {
  Micros s_ideal_period{0};
  Micros accumulated_stall{0};
  int64_t n_remain_intv = 0;
  int64_t severe_interval_count = 0;
  int64_t total_interval_count = 0;
  int64_t current_limit_mb = 0;
  // Fractional MB carried until a whole MB can be applied.
  double residual_mb = 0.0;
  bool dropped = false;

  friend bool operator==(const SaraJobState&, const SaraJobState&) = default;
};

// Stall a job can absorb and still finish by its deadline. Negative when the
// start delay alone already makes the deadline infeasible.
Micros IdealPeriodStall(Micros deadline, Micros t_bcet, Micros t_wait);

// Remaining stall budget spread evenly over the remaining intervals.
absl::StatusOr<MicrosF> IdealIntervalStall(Micros s_ideal_period,
                                           Micros accumulated,
                                           int64_t n_remain);

// Proportional limit change in MB: positive grants memory to the soft RT
// task, negative reclaims it.
double MemoryAdjustment(double base_unit_x_mb, Micros s_intv,
                        MicrosF s_ideal_intv, Micros l_intv);

// True when s_intv exceeds n% of the interval length.
bool IsSevere(Micros s_intv, Micros l_intv, double n_percent);

bool IsLongStall(int64_t severe_count, int64_t total_count, double m_percent);

// Drop only a job that has exhausted its stall budget while the intervals
// observed so far match the long-stall pattern.
bool ShouldDrop(const SaraJobState& state, const SaraConfig& config);

SaraJobState OnPeriodStart(const TaskSpec& task, Micros t_wait,
                           const SaraConfig& config, int64_t current_limit_mb);

std::pair<SaraJobState, AllocatorDecision> OnInterval(
    const SaraJobState& state, const metrics::StallSample& sample,
    const SaraConfig& config, const TaskSpec& task);

// Allocator adapter holding one SaraJobState per soft RT task. A dropped
// job's limit stays at the working-set minimum until the next job starts,
// which gets the pre-drop limit back.
class SaraAllocator : public Allocator {
 public:
  // Parameters not given are taken from the scenario at Reset.
  struct Options {
    std::optional<double> base_unit_x_mb;
    double long_stall_m = 80.0;
    double long_stall_n = 90.0;
    bool drop_enabled = true;
  };

  SaraAllocator() = default;
  explicit SaraAllocator(Options options) : options_(options) {}

  std::string_view Name() const override { return "sara"; }
  absl::Status Reset(const ScenarioConfig& config) override;
  AllocatorDecision OnPeriodStart(const TaskSpec& task,
                                  const JobStart& job) override;
  AllocatorDecision OnInterval(const TaskSpec& task,
                               const IntervalObservation& obs) override;

  const SaraConfig& config() const { return config_; }
  const SaraJobState& job_state(size_t task) const { return states_[task]; }

 private:
  Options options_;
  SaraConfig config_;
  std::vector<SaraJobState> states_;
  std::vector<std::optional<int64_t>> limit_before_drop_;
};

}  // namespace stallsim::sara

#endif  // STALLSIM_SARA_H_
