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

#include <cmath>
#include <cstdlib>
#include <random>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "support/scenarios.h"

namespace stallsim {
namespace {

using ::stallsim::test_support::FastSsd;
using ::stallsim::test_support::GraphchiTask;
using ::stallsim::test_support::SharedScenario;
using ::stallsim::test_support::SlowSsd;
using ::stallsim::test_support::SphinxTask;
using ::testing::HasSubstr;

// Holds every soft RT task at one limit.
class FixedLimit : public Allocator {
 public:
  explicit FixedLimit(int64_t limit_mb) : limit_mb_(limit_mb) {}
  std::string_view Name() const override { return "fixed"; }
  absl::Status Reset(const ScenarioConfig&) override { return absl::OkStatus(); }
  AllocatorDecision OnPeriodStart(const TaskSpec&, const JobStart& job) override {
    return {.delta_mb = limit_mb_ - job.limit_mb};
  }
  AllocatorDecision OnInterval(const TaskSpec&,
                               const IntervalObservation& obs) override {
    return {.delta_mb = limit_mb_ - obs.limit_mb};
  }

 private:
  int64_t limit_mb_;
};

// Random limit changes, some far outside the feasible range.
class RandomWalk : public Allocator {
 public:
  std::string_view Name() const override { return "walk"; }
  absl::Status Reset(const ScenarioConfig&) override {
    rng_.seed(99);
    return absl::OkStatus();
  }
  AllocatorDecision OnPeriodStart(const TaskSpec&, const JobStart&) override {
    return Step();
  }
  AllocatorDecision OnInterval(const TaskSpec&,
                               const IntervalObservation&) override {
    return Step();
  }

 private:
  AllocatorDecision Step() {
    std::uniform_int_distribution<int64_t> d(-400, 400);
    return {.delta_mb = d(rng_)};
  }
  std::mt19937_64 rng_;
};

// Tracks demand exactly, as much as memory allows.
class FollowDemand : public Allocator {
 public:
  std::string_view Name() const override { return "follow"; }
  absl::Status Reset(const ScenarioConfig&) override { return absl::OkStatus(); }
  AllocatorDecision OnPeriodStart(const TaskSpec&, const JobStart& job) override {
    return {.delta_mb = job.demand_mb - job.limit_mb};
  }
  AllocatorDecision OnInterval(const TaskSpec&,
                               const IntervalObservation& obs) override {
    return {.delta_mb = obs.demand_mb - obs.limit_mb};
  }
};

ScenarioConfig Roomy(int64_t periods) {
  ScenarioConfig c = SharedScenario(1.0, SlowSsd(), periods);
  return c;
}

double ExpectedFaultCostUs(double read_bw, double write_bw, int tasks,
                           double dirty) {
  return 4096.0 / (read_bw / tasks) * 1e6 + dirty * 4096.0 / (write_bw / tasks) * 1e6;
}

TEST(FaultCostTest, SlowSsdSingleTask) {
  EXPECT_NEAR(FaultCost(SlowSsd(), 1, 0.0).count(), 7.3, 0.02);
  EXPECT_NEAR(FaultCost(SlowSsd(), 1, 0.0).count(), 4096.0 / 560.0, 1e-9);
}

TEST(FaultCostTest, FastSsdSingleTask) {
  EXPECT_NEAR(FaultCost(FastSsd(), 1, 0.0).count(), 1.95, 0.01);
}

TEST(FaultCostTest, TwoTasksHalveBandwidth) {
  EXPECT_NEAR(FaultCost(SlowSsd(), 2, 0.0).count(), 14.6, 0.05);
  EXPECT_DOUBLE_EQ(FaultCost(SlowSsd(), 2, 0.0).count(),
                   2.0 * FaultCost(SlowSsd(), 1, 0.0).count());
}

TEST(FaultCostTest, DirtyPagesAddWriteBack) {
  EXPECT_NEAR(FaultCost(SlowSsd(), 1, 0.3).count(),
              ExpectedFaultCostUs(560e6, 510e6, 1, 0.3), 1e-9);
}

TEST(FaultCostTest, PerOpLatencyAdds) {
  SsdProfile ssd = SlowSsd();
  ssd.per_op_latency = Micros(20);
  EXPECT_NEAR(FaultCost(ssd, 1, 0.0).count(), 20.0 + 4096.0 / 560.0, 1e-9);
}

TEST(FaultCostTest, ZeroFaultingTasksCountsAsOne) {
  EXPECT_DOUBLE_EQ(FaultCost(SlowSsd(), 0, 0.0).count(),
                   FaultCost(SlowSsd(), 1, 0.0).count());
}

TEST(RunScenarioTest, UnlimitedMemoryHasNoStall) {
  ScenarioConfig config = Roomy(10);
  FollowDemand allocator;
  absl::StatusOr<TraceLog> trace = RunScenario(config, allocator);
  ASSERT_TRUE(trace.ok()) << trace.status();
  ASSERT_EQ(trace->periods[0].size(), 10u);
  for (const PeriodRecord& p : trace->periods[0]) {
    EXPECT_EQ(p.s_period, Micros(0));
    EXPECT_EQ(p.t_exec, config.tasks[0].t_bcet);
    EXPECT_EQ(p.t_wait, Micros(0));
    EXPECT_TRUE(p.deadline_met);
  }
}

TEST(RunScenarioTest, DeterministicForSeed) {
  ScenarioConfig config = SharedScenario(0.6, SlowSsd(), 60, 5);
  config.long_stall.probability_per_period = 0.05;
  FixedLimit a(240);
  FixedLimit b(240);
  absl::StatusOr<TraceLog> first = RunScenario(config, a);
  absl::StatusOr<TraceLog> second = RunScenario(config, b);
  ASSERT_TRUE(first.ok());
  ASSERT_TRUE(second.ok());
  EXPECT_TRUE(*first == *second);
}

TEST(RunScenarioTest, SeedChangesDemand) {
  ScenarioConfig config = SharedScenario(0.6, SlowSsd(), 30, 1);
  FixedLimit a(240);
  absl::StatusOr<TraceLog> first = RunScenario(config, a);
  config.seed = 2;
  absl::StatusOr<TraceLog> second = RunScenario(config, a);
  ASSERT_TRUE(first.ok());
  ASSERT_TRUE(second.ok());
  EXPECT_FALSE(first->periods == second->periods);
}

TEST(RunScenarioTest, RejectsZeroHorizon) {
  ScenarioConfig config = Roomy(10);
  config.horizon_periods = 0;
  FixedLimit a(200);
  absl::StatusOr<TraceLog> trace = RunScenario(config, a);
  ASSERT_FALSE(trace.ok());
  EXPECT_THAT(trace.status().message(), HasSubstr("horizon_periods"));
}

TEST(RunScenarioTest, RejectsMemoryBelowMinima) {
  ScenarioConfig config = Roomy(10);
  config.total_memory_mb = 100;
  FixedLimit a(200);
  EXPECT_FALSE(RunScenario(config, a).ok());
}

TEST(RunScenarioTest, PropagatesAllocatorResetError) {
  class Broken : public FixedLimit {
   public:
    Broken() : FixedLimit(200) {}
    absl::Status Reset(const ScenarioConfig&) override {
      return absl::InternalError("broken allocator");
    }
  };
  Broken broken;
  absl::StatusOr<TraceLog> trace = RunScenario(Roomy(5), broken);
  ASSERT_FALSE(trace.ok());
  EXPECT_EQ(trace.status().message(), "broken allocator");
}

TEST(RunScenarioTest, OverrunDelaysNextJob) {
  ScenarioConfig config = SharedScenario(0.6, SlowSsd(), 80);
  FixedLimit tight(150);
  absl::StatusOr<TraceLog> trace = RunScenario(config, tight);
  ASSERT_TRUE(trace.ok());
  const std::vector<PeriodRecord>& periods = trace->periods[0];
  ASSERT_EQ(periods.size(), 80u);
  bool saw_wait = false;
  for (size_t i = 0; i < periods.size(); ++i) {
    const PeriodRecord& p = periods[i];
    EXPECT_EQ(p.elapsed, p.t_wait + p.t_exec);
    EXPECT_EQ(p.deadline_met, !p.dropped && p.elapsed <= config.tasks[0].deadline);
    if (i > 0 && p.t_wait > Micros(0)) {
      saw_wait = true;
      const PeriodRecord& prev = periods[i - 1];
      EXPECT_EQ(p.start, prev.start + prev.t_exec);
    }
  }
  EXPECT_TRUE(saw_wait);
}

TEST(RunScenarioTest, CapacityHoldsUnderRandomDecisions) {
  ScenarioConfig config = SharedScenario(0.6, FastSsd(), 40);
  RandomWalk walk;
  absl::StatusOr<TraceLog> trace = RunScenario(config, walk);
  ASSERT_TRUE(trace.ok()) << trace.status();
  int64_t limit_sum = 0;
  int64_t resident_sum = 0;
  Micros time{-1};
  for (const IntervalRecord& r : trace->intervals) {
    if (r.time != time) {
      EXPECT_LE(limit_sum, config.total_memory_mb);
      EXPECT_LE(resident_sum, config.total_memory_mb);
      limit_sum = resident_sum = 0;
      EXPECT_GT(r.time, time);
      time = r.time;
    }
    limit_sum += r.limit_mb;
    resident_sum += r.resident_mb;
    EXPECT_LE(r.resident_mb, r.limit_mb);
    EXPECT_GE(r.limit_mb, config.tasks[r.task].working_set.min_mb);
    EXPECT_LE(metrics::IntervalStall(r.sample), config.l_intv);
  }
  EXPECT_EQ(limit_sum, config.total_memory_mb);
}

TEST(RunScenarioTest, ExecutionTimeTracksStallForFixedLimits) {
  for (int64_t limit : {150, 200, 240, 281}) {
    ScenarioConfig config = SharedScenario(0.6, SlowSsd(), 100);
    config.long_stall.probability_per_period = 0.03;
    FixedLimit fixed(limit);
    absl::StatusOr<TraceLog> trace = RunScenario(config, fixed);
    ASSERT_TRUE(trace.ok());
    for (const PeriodRecord& p : trace->periods[0]) {
      if (p.dropped || p.long_stall) continue;
      const Micros gap = p.t_exec - (p.s_period + config.tasks[0].t_bcet);
      EXPECT_LE(std::abs(gap.count()), 2 * config.l_intv.count())
          << "limit " << limit << " period " << p.period_index;
    }
  }
}

Micros MeanStall(const TraceLog& trace) {
  Micros total{0};
  for (const PeriodRecord& p : trace.periods[0]) total += p.s_period;
  return total / static_cast<int64_t>(trace.periods[0].size());
}

Micros MeanExec(const TraceLog& trace) {
  Micros total{0};
  for (const PeriodRecord& p : trace.periods[0]) total += p.t_exec;
  return total / static_cast<int64_t>(trace.periods[0].size());
}

TEST(RunScenarioTest, MoreMemoryNeverMoreStall) {
  Micros previous = Micros::max();
  for (int64_t limit = 140; limit <= 338; limit += 22) {
    ScenarioConfig config = SharedScenario(0.8, SlowSsd(), 60);
    FixedLimit fixed(limit);
    absl::StatusOr<TraceLog> trace = RunScenario(config, fixed);
    ASSERT_TRUE(trace.ok());
    const Micros stall = MeanStall(*trace);
    EXPECT_LE(stall, previous) << "limit " << limit;
    previous = stall;
  }
}

TEST(RunScenarioTest, FastSsdNeverSlower) {
  for (int64_t limit : {150, 200, 250, 300}) {
    FixedLimit fixed(limit);
    absl::StatusOr<TraceLog> slow =
        RunScenario(SharedScenario(0.8, SlowSsd(), 60), fixed);
    absl::StatusOr<TraceLog> fast =
        RunScenario(SharedScenario(0.8, FastSsd(), 60), fixed);
    ASSERT_TRUE(slow.ok());
    ASSERT_TRUE(fast.ok());
    EXPECT_LE(MeanExec(*fast), MeanExec(*slow)) << "limit " << limit;
  }
}

TEST(RunScenarioTest, WindowsAccountForEveryInterval) {
  ScenarioConfig config = SharedScenario(0.6, SlowSsd(), 30);
  FixedLimit fixed(220);
  absl::StatusOr<TraceLog> trace = RunScenario(config, fixed);
  ASSERT_TRUE(trace.ok());
  int64_t intervals = 0;
  Micros nonrt_stall{0};
  for (const WindowRecord& w : trace->windows) {
    if (w.task == 0) intervals += w.intervals;
    if (w.task == 1) nonrt_stall += w.s_intv_sum;
  }
  EXPECT_EQ(intervals * config.l_intv.count(), trace->end_time.count());
  // Non-RT progress plus stall fills every interval.
  EXPECT_EQ(trace->nonrt_work + nonrt_stall, trace->end_time);
}

TEST(SimulatorTest, NoDeficitMeansNoStall) {
  ScenarioConfig config = Roomy(4);
  for (TaskSpec& t : config.tasks) t.demand_jitter = 0.0;
  absl::StatusOr<Simulator> sim = Simulator::Create(config);
  ASSERT_TRUE(sim.ok());
  std::vector<JobStart> started = sim->StartPendingJobs();
  ASSERT_EQ(started.size(), 1u);
  const IntervalOutcome out = sim->Advance();
  EXPECT_EQ(out.samples[0].s_mem, Micros(0));
  EXPECT_EQ(out.samples[0].s_io, Micros(0));
  EXPECT_EQ(sim->state().tasks[0].progress, config.l_intv);
}

TEST(SimulatorTest, LongStallStallsEveryTask) {
  ScenarioConfig config = Roomy(4);
  config.long_stall.probability_per_period = 1.0;
  absl::StatusOr<Simulator> sim = Simulator::Create(config);
  ASSERT_TRUE(sim.ok());
  sim->StartPendingJobs();
  const IntervalOutcome out = sim->Advance();
  for (const metrics::StallSample& s : out.samples) {
    EXPECT_EQ(s.s_mem, config.l_intv);
    EXPECT_EQ(s.s_io, config.l_intv);
  }
  EXPECT_EQ(sim->state().tasks[0].progress, Micros(0));
  EXPECT_EQ(sim->trace().nonrt_work, Micros(0));
  ASSERT_EQ(sim->trace().long_stall_events.size(), 1u);
  EXPECT_EQ(sim->trace().long_stall_events[0].first, Micros(0));
  const Micros length = sim->trace().long_stall_events[0].second;
  EXPECT_GE(length, config.long_stall.min_duration);
  EXPECT_LE(length, config.long_stall.max_duration + config.l_intv);
  EXPECT_EQ(length.count() % config.l_intv.count(), 0);
}

// Half of GraphChi's demand is resident, Sphinx fits: the non-RT stall is the
// fixed point of stall = touch * (l - stall) * miss * cost.
TEST(SimulatorTest, HalfDeficitMatchesClosedForm) {
  ScenarioConfig config = SharedScenario(1.0, SlowSsd(), 4);
  for (TaskSpec& t : config.tasks) t.demand_jitter = 0.0;
  config.total_memory_mb = 281 + 122;
  absl::StatusOr<Simulator> sim = Simulator::Create(config);
  ASSERT_TRUE(sim.ok());
  sim->StartPendingJobs();
  ASSERT_EQ(sim->nonrt_limit_mb(), 122);
  const IntervalOutcome out = sim->Advance();

  const double cost = ExpectedFaultCostUs(560e6, 510e6, 1, 0.3);
  const double k = 1.0 * 6.0 * 0.5 * cost;
  const double l = 5000.0;
  const double stall = l * k / (1.0 + k);
  EXPECT_NEAR(static_cast<double>(out.samples[1].s_mem.count()), stall, 0.5);
  EXPECT_NEAR(static_cast<double>(out.samples[1].s_io.count()), 0.7 * stall, 1.0);
  EXPECT_EQ(out.samples[0], (metrics::StallSample{.interval_index = 0}));
}

TEST(SimulatorTest, IoDominantAttributionUsesIoAsInterval) {
  ScenarioConfig config = SharedScenario(1.0, SlowSsd(), 4);
  for (TaskSpec& t : config.tasks) t.demand_jitter = 0.0;
  config.total_memory_mb = 281 + 122;
  config.stall_attribution = {.mem_fraction = 0.4, .io_fraction = 1.0};
  absl::StatusOr<Simulator> sim = Simulator::Create(config);
  ASSERT_TRUE(sim.ok());
  sim->StartPendingJobs();
  const IntervalOutcome out = sim->Advance();
  EXPECT_GT(out.samples[1].s_io, out.samples[1].s_mem);
  EXPECT_EQ(metrics::IntervalStall(out.samples[1]), out.samples[1].s_io);
}

TEST(SimulatorTest, ApplyClampsToWorkingSetMinimum) {
  ScenarioConfig config = SharedScenario(0.6, SlowSsd(), 4);
  absl::StatusOr<Simulator> sim = Simulator::Create(config);
  ASSERT_TRUE(sim.ok());
  ASSERT_TRUE(sim->Apply(0, {.delta_mb = -10'000}).ok());
  EXPECT_EQ(sim->state().tasks[0].limit_mb, 136);
  ASSERT_TRUE(sim->Apply(0, {.delta_mb = 10'000}).ok());
  EXPECT_EQ(sim->state().tasks[0].limit_mb, config.total_memory_mb - 36);
  EXPECT_EQ(sim->nonrt_limit_mb(), 36);
}

TEST(SimulatorTest, ApplyRejectsNonRtTarget) {
  absl::StatusOr<Simulator> sim = Simulator::Create(Roomy(4));
  ASSERT_TRUE(sim.ok());
  absl::Status s = sim->Apply(1, {.delta_mb = 1});
  EXPECT_EQ(s.code(), absl::StatusCode::kInvalidArgument);
  EXPECT_FALSE(sim->Apply(7, {}).ok());
}

TEST(SimulatorTest, ApplyRejectsOversubscription) {
  ScenarioConfig config = SharedScenario(0.6, SlowSsd(), 4);
  TaskSpec second = SphinxTask();
  second.name = "sphinx2";
  config.tasks.insert(config.tasks.begin() + 1, second);
  config.total_memory_mb = 136 + 300 + 36;
  absl::StatusOr<Simulator> sim = Simulator::Create(config);
  ASSERT_TRUE(sim.ok()) << sim.status();
  ASSERT_TRUE(sim->Apply(0, {.delta_mb = 1000}).ok());
  absl::Status s = sim->Apply(1, {.delta_mb = 1000});
  EXPECT_EQ(s.code(), absl::StatusCode::kFailedPrecondition);
  EXPECT_THAT(s.message(), HasSubstr("oversubscribes"));
}

TEST(NonRtThroughputTest, UnstalledRate) {
  ScenarioConfig config = Roomy(10);
  config.tasks[0].period = Micros(1'000'000);
  config.tasks[0].deadline = Micros(1'000'000);
  FollowDemand allocator;
  absl::StatusOr<TraceLog> trace = RunScenario(config, allocator);
  ASSERT_TRUE(trace.ok());
  EXPECT_EQ(trace->end_time, Micros(10'000'000));
  EXPECT_DOUBLE_EQ(NonRtThroughput(*trace), 10.0);
}

TEST(NonRtThroughputTest, HalfStallHalvesRate) {
  TraceLog trace;
  trace.end_time = Micros(10'000'000);
  trace.nonrt_work_unit = Micros(100'000);
  trace.nonrt_work = Micros(5'000'000);
  EXPECT_DOUBLE_EQ(NonRtThroughput(trace), 5.0);
}

TEST(NonRtThroughputTest, EmptyTraceIsZero) {
  EXPECT_EQ(NonRtThroughput(TraceLog{}), 0.0);
  TraceLog no_unit;
  no_unit.end_time = Micros(5);
  no_unit.nonrt_work = Micros(5);
  EXPECT_EQ(NonRtThroughput(no_unit), 0.0);
}

TEST(ScenarioValidateTest, RejectsBadTask) {
  TaskSpec t = SphinxTask();
  t.working_set.min_mb = 400;
  EXPECT_FALSE(t.Validate().ok());
  t = SphinxTask();
  t.name.clear();
  EXPECT_FALSE(t.Validate().ok());
  EXPECT_TRUE(GraphchiTask().Validate().ok());
}

TEST(ScenarioValidateTest, RejectsBadSsd) {
  SsdProfile ssd = SlowSsd();
  ssd.read_bw = 0;
  EXPECT_FALSE(ssd.Validate().ok());
  EXPECT_TRUE(FastSsd().Validate().ok());
}

TEST(ScenarioValidateTest, UncontendedDetectsFit) {
  EXPECT_TRUE(SharedScenario(1.0, SlowSsd()).uncontended());
  EXPECT_FALSE(SharedScenario(0.6, SlowSsd()).uncontended());
  EXPECT_EQ(SharedScenario(0.6, SlowSsd()).primary_task(), 0u);
}

}  // namespace
}  // namespace stallsim
