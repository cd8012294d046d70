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

#ifndef STALLSIM_SCENARIO_H_
#define STALLSIM_SCENARIO_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "stallsim/units.h"

namespace stallsim {

enum class TaskKind { kSoftRt, kNonRt };

struct WorkingSet {
  int64_t min_mb = 0;
  int64_t avg_mb = 0;
  int64_t max_mb = 0;
};

// One workload sharing the machine. Soft RT tasks release a job every
// `period`; the job needs `t_bcet` of unstalled execution and should finish
// within `deadline` of its release. The non-RT task runs continuously and
// completes a work unit for every `work_unit` of unstalled progress.
struct TaskSpec {
  std::string name;
  TaskKind kind = TaskKind::kSoftRt;
  Micros period{0};
  Micros deadline{0};
  Micros t_bcet{0};
  WorkingSet working_set;
  // Half-width of the per-period demand range, as a fraction of the distance
  // from avg to min (below) and avg to max (above). 0 disables jitter.
  double demand_jitter = 0.5;
  // Pages touched per microsecond of execution progress.
  double touch_rate = 1.0;
  // Share of evicted pages that must be written back.
  double dirty_fraction = 0.0;
  Micros work_unit{100'000};

  bool soft_rt() const { return kind == TaskKind::kSoftRt; }
  absl::Status Validate() const;
};

struct SsdProfile {
  std::string name;
  double read_bw = 0.0;   // bytes per second
  double write_bw = 0.0;  // bytes per second
  Micros per_op_latency{0};
  int64_t page_size = 4096;

  absl::Status Validate() const;
};

struct LongStallConfig {
  double probability_per_period = 0.0;
  Micros min_duration{0};
  Micros max_duration{0};
};

// Raw fault stall is reported as s_mem = mem_fraction * raw and
// s_io = io_fraction * raw.
struct StallAttribution {
  double mem_fraction = 1.0;
  double io_fraction = 0.7;
};

struct ScenarioConfig {
  int64_t total_memory_mb = 0;
  Micros l_intv{5000};
  double base_unit_x_mb = 1.0;
  SsdProfile ssd;
  std::vector<TaskSpec> tasks;
  LongStallConfig long_stall;
  uint64_t seed = 1;
  int64_t horizon_periods = 500;
  StallAttribution stall_attribution;
  Micros t_drop{10'000};

  // Index of the first soft RT task. Its period paces non-RT demand changes
  // and long-stall injection.
  size_t primary_task() const;
  // True when every task's peak working set fits at once.
  bool uncontended() const;
  absl::Status Validate() const;
};

}  // namespace stallsim

#endif  // STALLSIM_SCENARIO_H_
