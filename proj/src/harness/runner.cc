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


#include "stallsim/harness/runner.h"

#include <atomic>
#include <thread>

#include "absl/strings/str_cat.h"
#include "stallsim/baselines.h"
#include "stallsim/sara.h"

namespace stallsim::harness {

absl::StatusOr<std::unique_ptr<Allocator>> MakeAllocator(
    const AllocatorSpec& spec, const ScenarioConfig& scenario) {
  switch (spec.kind) {
    case AllocatorKind::kSara: {
      sara::SaraAllocator::Options options;
      options.base_unit_x_mb = spec.base_unit_x_mb;
      options.long_stall_m = spec.long_stall_m;
      options.long_stall_n = spec.long_stall_n;
      options.drop_enabled = spec.drop_enabled;
      return std::make_unique<sara::SaraAllocator>(options);
    }
    case AllocatorKind::kGreedy:
      return std::make_unique<baselines::GreedyAllocator>();
    case AllocatorKind::kOffline: {
      absl::StatusOr<baselines::OfflineProfile> profile =
          baselines::ProfileOffline(scenario);
      if (!profile.ok()) return profile.status();
      return std::make_unique<baselines::StaticAllocator>(*std::move(profile),
                                                          spec.label);
    }
    case AllocatorKind::kTmoLow:
      return std::make_unique<baselines::TmoAllocator>(spec.tmo, spec.label);
    case AllocatorKind::kTmoHigh: {
      absl::StatusOr<baselines::TmoConfig> found = baselines::TmoHighSearch(
          scenario, scenario.primary_task(), baselines::DefaultTmoGrid(),
          spec.tmo);
      if (!found.ok()) return found.status();
      return std::make_unique<baselines::TmoAllocator>(*found, spec.label);
    }
  }
  return absl::InvalidArgumentError("unknown allocator kind");
}

uint64_t RepetitionSeed(const ExperimentConfig& config, int64_t repetition) {
  return config.scenario.seed + static_cast<uint64_t>(repetition);
}

std::filesystem::path CellDirectory(const std::filesystem::path& root,
                                    const ExperimentConfig& config,
                                    const AllocatorSpec& allocator,
                                    uint64_t seed) {
  return root / config.label / allocator.label / absl::StrCat("seed-", seed);
}

CellInfo DescribeCell(const ExperimentConfig& config,
                      const AllocatorSpec& allocator, uint64_t seed) {
  const ScenarioConfig& sc = config.scenario;
  const TaskSpec& primary = sc.tasks[sc.primary_task()];
  CellInfo info;
  info.config = config.label;
  info.allocator = allocator.label;
  info.allocator_kind = std::string(AllocatorKindName(allocator.kind));
  info.seed = seed;
  info.memory_fraction = config.memory_fraction;
  info.total_memory_mb = sc.total_memory_mb;
  info.ssd = sc.ssd.name;
  info.ssd_read_bw = sc.ssd.read_bw;
  info.drop_enabled =
      allocator.kind == AllocatorKind::kSara && allocator.drop_enabled;
  info.long_stall_probability = sc.long_stall.probability_per_period;
  info.task = primary.name;
  for (const TaskSpec& t : sc.tasks) {
    if (!t.soft_rt()) {
      info.nonrt_task = t.name;
      info.work_unit = t.work_unit;
    }
  }
  info.deadline = primary.deadline;
  info.l_intv = sc.l_intv;
  info.horizon_periods = sc.horizon_periods;
  return info;
}

absl::StatusOr<CellRun> RunCell(const ExperimentConfig& config,
                                const AllocatorSpec& allocator,
                                int64_t repetition, bool record_intervals) {
  ScenarioConfig scenario = config.scenario;
  scenario.seed = RepetitionSeed(config, repetition);
  absl::StatusOr<std::unique_ptr<Allocator>> alloc =
      MakeAllocator(allocator, scenario);
  if (!alloc.ok()) return alloc.status();
  absl::StatusOr<TraceLog> trace =
      RunScenario(scenario, **alloc, RunOptions{.record_intervals =
                                                    record_intervals});
  if (!trace.ok()) return trace.status();

  const size_t primary = scenario.primary_task();
  std::vector<WindowRecord> primary_windows;
  std::vector<WindowRecord> nonrt_windows;
  for (const WindowRecord& w : trace->windows) {
    if (w.task == primary) primary_windows.push_back(w);
    if (!scenario.tasks[w.task].soft_rt()) nonrt_windows.push_back(w);
  }
  CellRun run;
  run.summary.info = DescribeCell(config, allocator, scenario.seed);
  run.summary.row = Summarize(allocator.label, trace->periods[primary],
                              primary_windows, nonrt_windows, scenario.l_intv,
                              run.summary.info.work_unit);
  run.trace = *std::move(trace);
  return run;
}

absl::Status ParallelFor(size_t count, int jobs,
                         const std::function<absl::Status(size_t)>& fn) {
  std::vector<absl::Status> results(count);
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < count; i = next++) results[i] = fn(i);
  };
  const size_t threads =
      std::min(count, static_cast<size_t>(std::max(jobs, 1)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (const absl::Status& s : results) {
    if (!s.ok()) return s;
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<CellSummary>> RunExperiment(
    const ExperimentPlan& plan, const RunSettings& settings) {
  std::vector<ExperimentConfig> configs = plan.configs;
  for (ExperimentConfig& c : configs) {
    if (settings.seed.has_value()) c.scenario.seed = *settings.seed;
    if (settings.output_dir.has_value()) c.output_dir = *settings.output_dir;
    if (absl::Status s = c.Validate(); !s.ok()) return s;
  }

  struct Cell {
    const ExperimentConfig* config;
    const AllocatorSpec* allocator;
    int64_t repetition;
  };
  std::vector<Cell> cells;
  for (const ExperimentConfig& c : configs) {
    for (const AllocatorSpec& a : c.allocators) {
      for (int64_t r = 0; r < c.repetitions; ++r) cells.push_back({&c, &a, r});
    }
  }

  std::vector<CellSummary> summaries(cells.size());
  absl::Status status =
      ParallelFor(cells.size(), settings.jobs, [&](size_t i) -> absl::Status {
        const Cell& cell = cells[i];
        const IntervalTrace mode = cell.config->interval_trace;
        const bool intervals =
            settings.write_bundles &&
            (mode == IntervalTrace::kAll ||
             (mode == IntervalTrace::kFirst && cell.repetition == 0));
        absl::StatusOr<CellRun> run =
            RunCell(*cell.config, *cell.allocator, cell.repetition, intervals);
        if (!run.ok()) {
          return absl::Status(
              run.status().code(),
              absl::StrCat(cell.config->label, "/", cell.allocator->label,
                           "/rep ", cell.repetition, ": ",
                           run.status().message()));
        }
        summaries[i] = run->summary;
        if (!settings.write_bundles) return absl::OkStatus();
        return WriteBundle(CellDirectory(cell.config->output_dir, *cell.config,
                                         *cell.allocator,
                                         run->summary.info.seed),
                           run->trace, run->summary, intervals);
      });
  if (!status.ok()) return status;
  return summaries;
}

}  // namespace stallsim::harness
