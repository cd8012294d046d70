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

#ifndef STALLSIM_ALLOCATOR_H_
#define STALLSIM_ALLOCATOR_H_

#include <cstdint>
#include <optional>
#include <string_view>

#include "absl/status/status.h"
#include "stallsim/metrics.h"
#include "stallsim/scenario.h"
#include "stallsim/units.h"

namespace stallsim {

struct PeriodRecord;

// Signed memory-limit adjustment for one soft RT task. With drop_job set the
// running job is aborted and delta_mb should bring the limit down to the
// working-set minimum.
struct AllocatorDecision {
  int64_t delta_mb = 0;
  bool drop_job = false;

  friend bool operator==(const AllocatorDecision&,
                         const AllocatorDecision&) = default;
};

struct JobStart {
  size_t task = 0;
  int64_t period_index = 0;
  Micros release{0};
  Micros start{0};
  Micros t_wait{0};
  int64_t limit_mb = 0;
  int64_t demand_mb = 0;
};

struct IntervalObservation {
  size_t task = 0;
  int64_t interval_index = 0;
  // End of the interval just observed.
  Micros now{0};
  // Whole-interval stall of the task, idle time included.
  metrics::StallSample sample;
  // Stall of the job still running at `now`, restricted to the part of the
  // interval it ran in. Absent when no job is running.
  std::optional<metrics::StallSample> job_sample;
  int64_t limit_mb = 0;
  int64_t demand_mb = 0;
  int64_t resident_mb = 0;
};

// Per-interval memory controller for soft RT tasks. The engine calls
// OnPeriodStart when a job begins executing, OnInterval at every interval
// boundary, and OnJobComplete when a job finishes or is dropped. Decisions are
// applied before the next interval.
class Allocator {
 public:
  virtual ~Allocator() = default;

  virtual std::string_view Name() const = 0;
  virtual absl::Status Reset(const ScenarioConfig& config) = 0;
  virtual AllocatorDecision OnPeriodStart(const TaskSpec& task,
                                          const JobStart& job) = 0;
  virtual AllocatorDecision OnInterval(const TaskSpec& task,
                                       const IntervalObservation& obs) = 0;
  virtual void OnJobComplete(const TaskSpec& /*task*/,
                             const PeriodRecord& /*record*/) {}
};

}  // namespace stallsim

#endif  // STALLSIM_ALLOCATOR_H_
