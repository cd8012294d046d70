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

#ifndef STALLSIM_SIMULATOR_H_
#define STALLSIM_SIMULATOR_H_

#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "stallsim/allocator.h"
#include "stallsim/metrics.h"
#include "stallsim/scenario.h"
#include "stallsim/units.h"

namespace stallsim {

// Outcome of one soft RT job.
struct PeriodRecord {
  size_t task = 0;
  int64_t period_index = 0;
  Micros release{0};
  Micros start{0};
  Micros t_wait{0};
  Micros t_exec{0};
  Micros elapsed{0};
  Micros s_period{0};
  bool deadline_met = false;
  bool dropped = false;
  // The job overlapped an injected long-stall event.
  bool long_stall = false;
  // Job-attributed s_intv for each interval boundary the job was running at,
  // in order. A trailing partial interval in which the job finished is
  // included in s_period but not listed here.
  std::vector<Micros> interval_stalls;

  friend bool operator==(const PeriodRecord&, const PeriodRecord&) = default;
};

struct IntervalRecord {
  Micros time{0};  // start of the interval
  size_t task = 0;
  metrics::StallSample sample;
  int64_t limit_mb = 0;
  int64_t resident_mb = 0;
  int64_t demand_mb = 0;

  friend bool operator==(const IntervalRecord&,
                         const IntervalRecord&) = default;
};

// Per-task totals over one primary period window [w * period, (w+1) * period).
// The window past the horizon may be partial.
struct WindowRecord {
  int64_t window_index = 0;
  size_t task = 0;
  int64_t intervals = 0;
  int64_t limit_mb_sum = 0;
  int64_t resident_mb_sum = 0;
  Micros s_intv_sum{0};

  friend bool operator==(const WindowRecord&, const WindowRecord&) = default;
};

struct TraceLog {
  std::vector<std::string> task_names;
  // Indexed by task; empty for the non-RT task.
  std::vector<std::vector<PeriodRecord>> periods;
  std::vector<IntervalRecord> intervals;
  // Always recorded; window-major, task-minor.
  std::vector<WindowRecord> windows;
  // Injected long-stall events as [start, end).
  std::vector<std::pair<Micros, Micros>> long_stall_events;
  // Unstalled execution time of the non-RT task, and its work unit.
  Micros nonrt_work{0};
  Micros nonrt_work_unit{0};
  Micros end_time{0};

  friend bool operator==(const TraceLog&, const TraceLog&) = default;
};

enum class JobPhase { kIdle, kRunning, kDropping };

struct TaskState {
  int64_t limit_mb = 0;
  int64_t resident_mb = 0;
  int64_t demand_mb = 0;
  // Soft RT: unstalled progress of the current job. Non-RT: progress not yet
  // converted into a completed work unit.
  Micros progress{0};

  JobPhase phase = JobPhase::kIdle;
  int64_t released = 0;
  std::deque<int64_t> queued;
  PeriodRecord job;
  Micros drop_remaining{0};
  std::optional<int64_t> limit_after_drop_mb;
};

struct SimState {
  Micros now{0};
  int64_t interval_index = 0;
  std::vector<TaskState> tasks;
  Micros long_stall_until{0};

  bool long_stall_active() const { return now < long_stall_until; }
};

struct IntervalOutcome {
  // Task-level sample per task for the interval just stepped.
  std::vector<metrics::StallSample> samples;
  // Per task: stall of the job still running at the end of the interval.
  std::vector<std::optional<metrics::StallSample>> job_samples;
  // Jobs that began strictly inside the interval.
  std::vector<JobStart> started;
  std::vector<PeriodRecord> completed;
};

// Per-fault service time: fixed device latency plus reading the page and,
// for the dirty share, writing back the evicted page. Bandwidth is shared
// evenly among tasks faulting in the same interval.
MicrosF FaultCost(const SsdProfile& ssd, int concurrent_faulting_tasks,
                  double dirty_fraction);

// Deterministic interval-stepped model of one machine. Within an interval a
// task with memory deficit D of demand W stalls for a fraction k/(1+k) of the
// time it executes, where k = touch_rate * (D/W) * fault_cost scaled by the
// dominant stall attribution. Progress plus stall always equals executed
// time.
class Simulator {
 public:
  static absl::StatusOr<Simulator> Create(const ScenarioConfig& config);

  const ScenarioConfig& config() const { return config_; }
  const SimState& state() const { return state_; }
  const TraceLog& trace() const { return trace_; }
  TraceLog TakeTrace() { return std::move(trace_); }

  void set_record_intervals(bool record) { record_intervals_ = record; }

  // Releases jobs due at the current boundary and starts a job on every idle
  // soft RT task with one queued. Safe to call repeatedly at one boundary.
  std::vector<JobStart> StartPendingJobs();

  // Applies one allocator decision to soft RT task `task`. The new limit is
  // clamped to [working-set min, total - other tasks' minima]; decisions that
  // still oversubscribe memory are rejected.
  absl::Status Apply(size_t task, const AllocatorDecision& decision);

  // Advances time by one interval.
  IntervalOutcome Advance();

  // Apply(i, decisions[i]) for every soft RT task, then Advance(). Entries
  // for non-RT tasks are ignored.
  absl::StatusOr<IntervalOutcome> StepInterval(
      std::span<const AllocatorDecision> decisions);

  // All horizon jobs are finished and the horizon time has elapsed.
  bool Finished() const;

  int64_t nonrt_limit_mb() const;

 private:
  class DrawStream {
   public:
    explicit DrawStream(uint64_t seed) : rng_(seed) {}
    // Uniform in [0, 1), generated in index order and cached.
    double At(int64_t index);

   private:
    std::mt19937_64 rng_;
    std::vector<double> values_;
  };

  explicit Simulator(const ScenarioConfig& config);

  void BeginBoundary();
  int64_t DrawDemand(const TaskSpec& spec, DrawStream& stream, int64_t index);
  void StartJob(size_t i, Micros at, IntervalOutcome* outcome);
  void FinishJob(size_t i, Micros at, bool dropped, IntervalOutcome* outcome);
  double StallRatio(size_t i, double fault_cost_us) const;
  Micros StepSoftRt(size_t i, double fault_cost_us, bool long_stall,
                    IntervalOutcome* outcome, Micros* job_stall);
  Micros StepNonRt(size_t i, double fault_cost_us, bool long_stall);
  metrics::StallSample Attribute(Micros stall) const;
  void UpdateResident(size_t i);
  Micros HorizonTime() const;

  ScenarioConfig config_;
  SimState state_;
  TraceLog trace_;
  bool record_intervals_ = true;
  Micros boundary_done_{-1};
  size_t primary_ = 0;
  std::vector<DrawStream> demand_streams_;
  DrawStream stall_hit_stream_;
  DrawStream stall_length_stream_;
};

struct RunOptions {
  bool record_intervals = true;
};

// Runs `config` under `allocator` until every soft RT task has finished
// horizon_periods jobs and the horizon has elapsed. Identical inputs give an
// identical TraceLog.
absl::StatusOr<TraceLog> RunScenario(const ScenarioConfig& config,
                                     Allocator& allocator,
                                     const RunOptions& options = {});

// Non-RT work units (fractional) per simulated second.
double NonRtThroughput(const TraceLog& trace);

}  // namespace stallsim

#endif  // STALLSIM_SIMULATOR_H_
