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

#include "stallsim/simulator.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "absl/strings/str_cat.h"

namespace stallsim {
namespace {

uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent streams so that demand draws and long-stall events do not
// depend on how many values another stream consumed.
uint64_t StreamSeed(uint64_t seed, uint64_t stream) {
  return SplitMix64(SplitMix64(seed) ^ SplitMix64(stream + 1));
}

constexpr uint64_t kStallHitStream = 1000;
constexpr uint64_t kStallLengthStream = 1001;

Micros RoundMicros(double us) { return Micros(std::llround(us)); }

}  // namespace

MicrosF FaultCost(const SsdProfile& ssd, int concurrent_faulting_tasks,
                  double dirty_fraction) {
  const double share = static_cast<double>(std::max(concurrent_faulting_tasks, 1));
  const double page = static_cast<double>(ssd.page_size);
  const double read_us = page / (ssd.read_bw / share) * 1e6;
  const double write_us = page / (ssd.write_bw / share) * 1e6;
  return MicrosF(static_cast<double>(ssd.per_op_latency.count()) + read_us +
                 dirty_fraction * write_us);
}

double Simulator::DrawStream::At(int64_t index) {
  while (static_cast<int64_t>(values_.size()) <= index) {
    values_.push_back(static_cast<double>(rng_() >> 11) * 0x1.0p-53);
  }
  return values_[static_cast<size_t>(index)];
}

absl::StatusOr<Simulator> Simulator::Create(const ScenarioConfig& config) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  return Simulator(config);
}

Simulator::Simulator(const ScenarioConfig& config)
    : config_(config),
      primary_(config.primary_task()),
      stall_hit_stream_(StreamSeed(config.seed, kStallHitStream)),
      stall_length_stream_(StreamSeed(config.seed, kStallLengthStream)) {
  const size_t n = config_.tasks.size();
  state_.tasks.resize(n);
  trace_.periods.resize(n);
  for (size_t i = 0; i < n; ++i) {
    trace_.task_names.push_back(config_.tasks[i].name);
    if (!config_.tasks[i].soft_rt()) {
      trace_.nonrt_work_unit = config_.tasks[i].work_unit;
    }
    demand_streams_.emplace_back(StreamSeed(config_.seed, i));
  }

  int64_t nonrt_minima = 0;
  int64_t soft_avg = 0;
  for (const TaskSpec& t : config_.tasks) {
    if (t.soft_rt()) {
      soft_avg += t.working_set.avg_mb;
    } else {
      nonrt_minima += t.working_set.min_mb;
    }
  }
  // Start each soft RT task at its average working set when that fits,
  // otherwise at its minimum.
  const bool avg_fits = soft_avg + nonrt_minima <= config_.total_memory_mb;
  for (size_t i = 0; i < n; ++i) {
    const TaskSpec& spec = config_.tasks[i];
    TaskState& ts = state_.tasks[i];
    ts.demand_mb = spec.working_set.avg_mb;
    if (spec.soft_rt()) {
      ts.limit_mb = avg_fits ? spec.working_set.avg_mb : spec.working_set.min_mb;
    }
  }
  for (size_t i = 0; i < n; ++i) {
    TaskState& ts = state_.tasks[i];
    if (!config_.tasks[i].soft_rt()) ts.limit_mb = nonrt_limit_mb();
    ts.resident_mb = std::min(ts.demand_mb, ts.limit_mb);
  }
}

int64_t Simulator::nonrt_limit_mb() const {
  int64_t limit = config_.total_memory_mb;
  for (size_t i = 0; i < config_.tasks.size(); ++i) {
    if (config_.tasks[i].soft_rt()) limit -= state_.tasks[i].limit_mb;
  }
  return limit;
}

Micros Simulator::HorizonTime() const {
  Micros horizon{0};
  for (const TaskSpec& t : config_.tasks) {
    if (t.soft_rt()) horizon = std::max(horizon, t.period * config_.horizon_periods);
  }
  return horizon;
}

bool Simulator::Finished() const {
  if (state_.now < HorizonTime()) return false;
  for (size_t i = 0; i < config_.tasks.size(); ++i) {
    if (!config_.tasks[i].soft_rt()) continue;
    const TaskState& ts = state_.tasks[i];
    if (ts.released < config_.horizon_periods || ts.phase != JobPhase::kIdle ||
        !ts.queued.empty()) {
      return false;
    }
  }
  return true;
}

int64_t Simulator::DrawDemand(const TaskSpec& spec, DrawStream& stream,
                              int64_t index) {
  const WorkingSet& ws = spec.working_set;
  const double avg = static_cast<double>(ws.avg_mb);
  const double lo = avg - spec.demand_jitter * static_cast<double>(ws.avg_mb - ws.min_mb);
  const double hi = avg + spec.demand_jitter * static_cast<double>(ws.max_mb - ws.avg_mb);
  return std::llround(lo + stream.At(index) * (hi - lo));
}

std::vector<JobStart> Simulator::StartPendingJobs() {
  const Micros now = state_.now;
  if (boundary_done_ != now) {
    boundary_done_ = now;
    const TaskSpec& primary = config_.tasks[primary_];
    if (now.count() % primary.period.count() == 0) {
      const int64_t j = now / primary.period;
      for (size_t i = 0; i < config_.tasks.size(); ++i) {
        if (!config_.tasks[i].soft_rt()) {
          state_.tasks[i].demand_mb =
              DrawDemand(config_.tasks[i], demand_streams_[i], j);
        }
      }
      if (j < config_.horizon_periods) {
        const LongStallConfig& ls = config_.long_stall;
        const double hit = stall_hit_stream_.At(j);
        const double u = stall_length_stream_.At(j);
        if (hit < ls.probability_per_period) {
          const double span =
              static_cast<double>((ls.max_duration - ls.min_duration).count());
          Micros length = ls.min_duration + RoundMicros(u * span);
          // Events cover whole intervals.
          const int64_t l = config_.l_intv.count();
          length = Micros((length.count() + l - 1) / l * l);
          state_.long_stall_until =
              std::max(state_.long_stall_until, now + length);
          trace_.long_stall_events.emplace_back(now, now + length);
        }
      }
    }
    for (size_t i = 0; i < config_.tasks.size(); ++i) {
      const TaskSpec& spec = config_.tasks[i];
      TaskState& ts = state_.tasks[i];
      if (!spec.soft_rt() || ts.released >= config_.horizon_periods) continue;
      if (now.count() % spec.period.count() == 0 &&
          now / spec.period == ts.released) {
        ts.queued.push_back(ts.released++);
      }
    }
  }

  IntervalOutcome scratch;
  for (size_t i = 0; i < config_.tasks.size(); ++i) {
    TaskState& ts = state_.tasks[i];
    if (config_.tasks[i].soft_rt() && ts.phase == JobPhase::kIdle &&
        !ts.queued.empty()) {
      StartJob(i, now, &scratch);
    }
  }
  return std::move(scratch.started);
}

void Simulator::StartJob(size_t i, Micros at, IntervalOutcome* outcome) {
  const TaskSpec& spec = config_.tasks[i];
  TaskState& ts = state_.tasks[i];
  const int64_t j = ts.queued.front();
  ts.queued.pop_front();
  ts.phase = JobPhase::kRunning;
  ts.progress = Micros::zero();
  ts.demand_mb = DrawDemand(spec, demand_streams_[i], j);
  ts.job = PeriodRecord{};
  ts.job.task = i;
  ts.job.period_index = j;
  ts.job.release = spec.period * j;
  ts.job.start = at;
  ts.job.t_wait = at - ts.job.release;
  outcome->started.push_back(JobStart{.task = i,
                                      .period_index = j,
                                      .release = ts.job.release,
                                      .start = at,
                                      .t_wait = ts.job.t_wait,
                                      .limit_mb = ts.limit_mb,
                                      .demand_mb = ts.demand_mb});
}

void Simulator::FinishJob(size_t i, Micros at, bool dropped,
                          IntervalOutcome* outcome) {
  const TaskSpec& spec = config_.tasks[i];
  TaskState& ts = state_.tasks[i];
  PeriodRecord& job = ts.job;
  job.t_exec = at - job.start;
  job.elapsed = at - job.release;
  job.dropped = dropped;
  job.deadline_met = !dropped && job.elapsed <= spec.deadline;
  trace_.periods[i].push_back(job);
  outcome->completed.push_back(job);
  ts.phase = JobPhase::kIdle;
  ts.progress = Micros::zero();
  if (ts.limit_after_drop_mb.has_value()) {
    ts.limit_mb = *ts.limit_after_drop_mb;
    ts.limit_after_drop_mb.reset();
  }
}

double Simulator::StallRatio(size_t i, double fault_cost_us) const {
  const TaskSpec& spec = config_.tasks[i];
  const TaskState& ts = state_.tasks[i];
  const int64_t limit = spec.soft_rt() ? ts.limit_mb : nonrt_limit_mb();
  const int64_t deficit = ts.demand_mb - limit;
  if (deficit <= 0 || ts.demand_mb <= 0) return 0.0;
  const StallAttribution& a = config_.stall_attribution;
  const double miss = static_cast<double>(deficit) / static_cast<double>(ts.demand_mb);
  return std::max(a.mem_fraction, a.io_fraction) * spec.touch_rate * miss *
         fault_cost_us;
}

Micros Simulator::StepSoftRt(size_t i, double fault_cost_us, bool long_stall,
                             IntervalOutcome* outcome, Micros* job_stall) {
  const TaskSpec& spec = config_.tasks[i];
  TaskState& ts = state_.tasks[i];
  const Micros l = config_.l_intv;
  const Micros start = state_.now;
  Micros pos{0};
  Micros task_stall{0};
  *job_stall = Micros::zero();

  while (pos < l) {
    if (ts.phase == JobPhase::kIdle) {
      if (ts.queued.empty()) break;
      StartJob(i, start + pos, outcome);
      *job_stall = Micros::zero();
    }
    const Micros avail = l - pos;
    if (ts.phase == JobPhase::kDropping) {
      const Micros used = std::min(avail, ts.drop_remaining);
      ts.drop_remaining -= used;
      pos += used;
      if (ts.drop_remaining == Micros::zero()) {
        FinishJob(i, start + pos, /*dropped=*/true, outcome);
      }
      continue;
    }

    if (long_stall) {
      ts.job.long_stall = true;
      ts.job.s_period += avail;
      *job_stall += avail;
      task_stall += avail;
      pos = l;
      break;
    }

    const double k = StallRatio(i, fault_cost_us);
    const Micros need = spec.t_bcet - ts.progress;
    const Micros finish =
        k == 0.0 ? need
                 : Micros(static_cast<int64_t>(
                       std::ceil(static_cast<double>(need.count()) * (1.0 + k))));
    Micros stall;
    if (finish <= avail) {
      stall = finish - need;
      pos += finish;
    } else {
      stall = RoundMicros(static_cast<double>(avail.count()) * k / (1.0 + k));
      stall = std::max(stall, avail - need);
      pos = l;
    }
    ts.progress += (finish <= avail ? finish : avail) - stall;
    ts.job.s_period += stall;
    *job_stall += stall;
    task_stall += stall;
    if (ts.progress >= spec.t_bcet) {
      FinishJob(i, start + pos, /*dropped=*/false, outcome);
      *job_stall = Micros::zero();
    }
  }
  return task_stall;
}

Micros Simulator::StepNonRt(size_t i, double fault_cost_us, bool long_stall) {
  const TaskSpec& spec = config_.tasks[i];
  TaskState& ts = state_.tasks[i];
  const Micros l = config_.l_intv;
  Micros stall = l;
  if (!long_stall) {
    const double k = StallRatio(i, fault_cost_us);
    stall = RoundMicros(static_cast<double>(l.count()) * k / (1.0 + k));
  }
  ts.progress += l - stall;
  trace_.nonrt_work += l - stall;
  while (ts.progress >= spec.work_unit) ts.progress -= spec.work_unit;
  return stall;
}

metrics::StallSample Simulator::Attribute(Micros stall) const {
  const StallAttribution& a = config_.stall_attribution;
  const double top = std::max(a.mem_fraction, a.io_fraction);
  const double s = static_cast<double>(stall.count());
  metrics::StallSample sample;
  sample.interval_index = state_.interval_index;
  sample.s_mem = a.mem_fraction == top ? stall : RoundMicros(s * a.mem_fraction / top);
  sample.s_io = a.io_fraction == top ? stall : RoundMicros(s * a.io_fraction / top);
  return sample;
}

void Simulator::UpdateResident(size_t i) {
  TaskState& ts = state_.tasks[i];
  const int64_t limit = config_.tasks[i].soft_rt() ? ts.limit_mb : nonrt_limit_mb();
  const int64_t target = std::min(ts.demand_mb, limit);
  if (ts.resident_mb >= target) {
    ts.resident_mb = target;
    return;
  }
  const double per_interval =
      config_.ssd.read_bw * ToSeconds(config_.l_intv) / static_cast<double>(kBytesPerMb);
  const int64_t swap_in = std::max<int64_t>(1, static_cast<int64_t>(per_interval));
  ts.resident_mb = std::min(target, ts.resident_mb + swap_in);
}

absl::Status Simulator::Apply(size_t task, const AllocatorDecision& decision) {
  if (task >= config_.tasks.size() || !config_.tasks[task].soft_rt()) {
    return absl::InvalidArgumentError(
        absl::StrCat("decision for task ", task, " which is not a soft RT task"));
  }
  TaskState& ts = state_.tasks[task];
  int64_t others_min = 0;
  for (size_t j = 0; j < config_.tasks.size(); ++j) {
    if (j != task) others_min += config_.tasks[j].working_set.min_mb;
  }
  const int64_t lo = config_.tasks[task].working_set.min_mb;
  const int64_t hi = std::max(lo, config_.total_memory_mb - others_min);
  const int64_t target = std::clamp(ts.limit_mb + decision.delta_mb, lo, hi);

  int64_t committed = target;
  int64_t nonrt_min = 0;
  for (size_t j = 0; j < config_.tasks.size(); ++j) {
    if (!config_.tasks[j].soft_rt()) {
      nonrt_min += config_.tasks[j].working_set.min_mb;
    } else if (j != task) {
      committed += state_.tasks[j].limit_mb;
    }
  }
  if (committed + nonrt_min > config_.total_memory_mb) {
    return absl::FailedPreconditionError(absl::StrCat(
        "allocator decision for task '", config_.tasks[task].name,
        "' oversubscribes memory: soft RT limits ", committed,
        " MB + non-RT minimum ", nonrt_min, " MB > ", config_.total_memory_mb,
        " MB"));
  }

  if (decision.drop_job && ts.phase == JobPhase::kRunning) {
    ts.phase = JobPhase::kDropping;
    ts.drop_remaining = config_.t_drop;
    ts.limit_after_drop_mb = target;
  } else if (ts.phase == JobPhase::kDropping) {
    ts.limit_after_drop_mb = target;
  } else {
    ts.limit_mb = target;
  }
  return absl::OkStatus();
}

IntervalOutcome Simulator::Advance() {
  IntervalOutcome outcome;
  {
    std::vector<JobStart> boundary = StartPendingJobs();
    outcome.started = std::move(boundary);
  }
  const size_t n = config_.tasks.size();
  const bool long_stall = state_.long_stall_active();

  int faulting = 0;
  for (size_t i = 0; i < n; ++i) {
    const TaskState& ts = state_.tasks[i];
    const bool executing =
        !config_.tasks[i].soft_rt() || ts.phase == JobPhase::kRunning;
    const int64_t limit = config_.tasks[i].soft_rt() ? ts.limit_mb : nonrt_limit_mb();
    if (executing && ts.demand_mb > limit) ++faulting;
  }

  std::vector<int64_t> limits(n);
  for (size_t i = 0; i < n; ++i) {
    limits[i] = config_.tasks[i].soft_rt() ? state_.tasks[i].limit_mb
                                           : nonrt_limit_mb();
  }

  outcome.samples.resize(n);
  outcome.job_samples.resize(n);
  // Soft RT tasks first: a drop finishing mid-interval releases memory that
  // the non-RT task sees for this interval.
  for (int pass = 0; pass < 2; ++pass) {
    for (size_t i = 0; i < n; ++i) {
      const TaskSpec& spec = config_.tasks[i];
      if (spec.soft_rt() != (pass == 0)) continue;
      const double cost =
          FaultCost(config_.ssd, faulting, spec.dirty_fraction).count();
      Micros stall;
      if (spec.soft_rt()) {
        Micros job_stall{0};
        stall = StepSoftRt(i, cost, long_stall, &outcome, &job_stall);
        TaskState& ts = state_.tasks[i];
        if (ts.phase == JobPhase::kRunning) {
          outcome.job_samples[i] = Attribute(job_stall);
          ts.job.interval_stalls.push_back(job_stall);
        }
      } else {
        stall = StepNonRt(i, cost, long_stall);
      }
      metrics::StallSample sample = Attribute(stall);
      if (long_stall) {
        sample.s_mem = config_.l_intv;
        sample.s_io = config_.l_intv;
      }
      outcome.samples[i] = sample;
    }
  }

  const int64_t window =
      state_.now / config_.tasks[primary_].period;
  if (trace_.windows.empty() || trace_.windows.back().window_index != window) {
    for (size_t i = 0; i < n; ++i) {
      trace_.windows.push_back(WindowRecord{.window_index = window, .task = i});
    }
  }
  WindowRecord* row = &trace_.windows[trace_.windows.size() - n];
  for (size_t i = 0; i < n; ++i) {
    UpdateResident(i);
    row[i].intervals += 1;
    row[i].limit_mb_sum += limits[i];
    row[i].resident_mb_sum += state_.tasks[i].resident_mb;
    row[i].s_intv_sum += metrics::IntervalStall(outcome.samples[i]);
    if (record_intervals_) {
      const TaskState& ts = state_.tasks[i];
      trace_.intervals.push_back(IntervalRecord{.time = state_.now,
                                                .task = i,
                                                .sample = outcome.samples[i],
                                                .limit_mb = limits[i],
                                                .resident_mb = ts.resident_mb,
                                                .demand_mb = ts.demand_mb});
    }
  }

  state_.now += config_.l_intv;
  ++state_.interval_index;
  trace_.end_time = state_.now;
  return outcome;
}

absl::StatusOr<IntervalOutcome> Simulator::StepInterval(
    std::span<const AllocatorDecision> decisions) {
  for (size_t i = 0; i < decisions.size() && i < config_.tasks.size(); ++i) {
    if (!config_.tasks[i].soft_rt()) continue;
    if (absl::Status s = Apply(i, decisions[i]); !s.ok()) return s;
  }
  return Advance();
}

absl::StatusOr<TraceLog> RunScenario(const ScenarioConfig& config,
                                     Allocator& allocator,
                                     const RunOptions& options) {
  absl::StatusOr<Simulator> created = Simulator::Create(config);
  if (!created.ok()) return created.status();
  Simulator& sim = *created;
  sim.set_record_intervals(options.record_intervals);
  if (absl::Status s = allocator.Reset(config); !s.ok()) return s;

  const std::vector<TaskSpec>& tasks = config.tasks;
  std::vector<std::pair<size_t, AllocatorDecision>> pending;
  while (!sim.Finished()) {
    for (const JobStart& start : sim.StartPendingJobs()) {
      pending.emplace_back(start.task,
                           allocator.OnPeriodStart(tasks[start.task], start));
    }
    for (const auto& [task, decision] : pending) {
      if (absl::Status s = sim.Apply(task, decision); !s.ok()) return s;
    }
    pending.clear();

    const IntervalOutcome outcome = sim.Advance();
    for (const PeriodRecord& record : outcome.completed) {
      allocator.OnJobComplete(tasks[record.task], record);
    }
    for (const JobStart& start : outcome.started) {
      pending.emplace_back(start.task,
                           allocator.OnPeriodStart(tasks[start.task], start));
    }
    const SimState& state = sim.state();
    for (size_t i = 0; i < tasks.size(); ++i) {
      if (!tasks[i].soft_rt()) continue;
      const TaskState& ts = state.tasks[i];
      IntervalObservation obs{.task = i,
                              .interval_index = state.interval_index - 1,
                              .now = state.now,
                              .sample = outcome.samples[i],
                              .job_sample = outcome.job_samples[i],
                              .limit_mb = ts.limit_mb,
                              .demand_mb = ts.demand_mb,
                              .resident_mb = ts.resident_mb};
      pending.emplace_back(i, allocator.OnInterval(tasks[i], obs));
    }
  }
  return sim.TakeTrace();
}

double NonRtThroughput(const TraceLog& trace) {
  if (trace.end_time <= Micros::zero()) return 0.0;
  if (trace.nonrt_work_unit <= Micros::zero()) return 0.0;
  const double units = static_cast<double>(trace.nonrt_work.count()) /
                       static_cast<double>(trace.nonrt_work_unit.count());
  return units / ToSeconds(trace.end_time);
}

}  // namespace stallsim
