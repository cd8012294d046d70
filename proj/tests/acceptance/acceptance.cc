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


// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Tolerances are fixed below and must not be relaxed to make a run
// pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "stallsim/cgroup.h"
#include "stallsim/harness/analysis.h"
#include "stallsim/harness/bundle.h"
#include "stallsim/harness/compare.h"
#include "stallsim/harness/config.h"
#include "stallsim/harness/profile.h"
#include "stallsim/harness/runner.h"
#include "stallsim/harness/sweep.h"
#include "stallsim/sara.h"
#include "support/golden.h"
#include "support/scenarios.h"

namespace stallsim::acceptance {
namespace {

namespace fs = std::filesystem;
using namespace harness;
using Clock = std::chrono::steady_clock;

// Formula oracles.
constexpr Micros kExpectedPeriodStall(1'020'000);
constexpr double kExpectedIntervalStallUs = 8200.0;
constexpr double kExpectedAdjustmentMb = 0.4;
constexpr double kFormulaBudgetS = 1.0;

// Linearity.
constexpr int64_t kLinearityPeriods = 300;
constexpr double kMinSlope = 0.95;
constexpr double kMaxSlope = 1.05;
constexpr double kInterceptTolerance = 0.10;
constexpr double kMinRSquared = 0.95;
constexpr double kLinearityBudgetS = 10.0;

// Closed loop.
constexpr int64_t kHorizonPeriods = 500;
constexpr int64_t kSeeds = 5;
constexpr double kMinHitRatio = 0.95;
constexpr double kMinElapsedShare = 0.80;
constexpr double kClosedLoopBudgetS = 120.0;

// Throughput.
constexpr double kMinPeakRatio = 2.0;
constexpr char kPeakConfig[] = "mem60-fast";

// Detection.
constexpr double kInjectionProbability = 0.02;
constexpr double kDetectM = 80.0;
constexpr double kDetectN = 90.0;
constexpr double kMinInjectedFlagged = 0.95;
constexpr double kMaxNormalFlagged = 0.05;

struct Outcome {
  bool passed = false;
  std::string detail;
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

int Jobs() {
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::string Fmt(double v) { return absl::StrFormat("%.4f", v); }

// Joins per-config notes and folds their pass flags.
class Notes {
 public:
  void Add(bool ok, std::string note) {
    passed_ = passed_ && ok;
    notes_.push_back(ok ? std::move(note) : absl::StrCat(note, " (FAIL)"));
  }
  Outcome Done(std::string prefix = "") const {
    return {passed_, absl::StrCat(prefix, absl::StrJoin(notes_, "; "))};
  }

 private:
  bool passed_ = true;
  std::vector<std::string> notes_;
};

Outcome FormulaExactness() {
  const Clock::time_point start = Clock::now();
  const Micros period = sara::IdealPeriodStall(Micros(1'500'000), Micros(480'000),
                                               Micros(0));
  const absl::StatusOr<MicrosF> interval =
      sara::IdealIntervalStall(Micros(1'020'000), Micros(200'000), 100);
  const double adjustment =
      sara::MemoryAdjustment(1.0, Micros(4000), MicrosF(2000), Micros(5000));
  const double elapsed = Seconds(start);
  const bool ok = period == kExpectedPeriodStall && interval.ok() &&
                  interval->count() == kExpectedIntervalStallUs &&
                  adjustment == kExpectedAdjustmentMb && elapsed < kFormulaBudgetS;
  return {ok, absl::StrFormat(
                  "ideal period %dus, ideal interval %.1fus, adjustment %+.3fMB, %.3fs",
                  period.count(), interval.ok() ? interval->count() : -1.0,
                  adjustment, elapsed)};
}

Outcome Linearity(const ScenarioConfig& base) {
  const Clock::time_point start = Clock::now();
  ScenarioConfig scenario = base;
  scenario.long_stall.probability_per_period = kInjectionProbability;
  ProfileOptions options;
  options.periods = kLinearityPeriods;
  options.m_grid = {kDetectM};
  options.n_grid = {kDetectN};
  absl::StatusOr<TaskProfile> profile =
      ProfileTask(scenario, scenario.primary_task(), options);
  if (!profile.ok()) return {false, std::string(profile.status().message())};
  const double bcet = ToSeconds(scenario.tasks[scenario.primary_task()].t_bcet);
  const double elapsed = Seconds(start);
  const metrics::LinearFit& fit = profile->fit;
  const bool ok = fit.slope >= kMinSlope && fit.slope <= kMaxSlope &&
                  std::abs(fit.intercept_s - bcet) <= kInterceptTolerance * bcet &&
                  fit.r_squared >= kMinRSquared && elapsed < kLinearityBudgetS;
  return {ok, absl::StrFormat(
                  "slope %.4f, intercept %.4fs (bcet %.3fs), r2 %.4f, %d points, %.2fs",
                  fit.slope, fit.intercept_s, bcet, fit.r_squared,
                  profile->points.size(), elapsed)};
}

struct MatrixResult {
  absl::Status status;
  Comparison comparison;
  double elapsed_s = 0.0;
};

MatrixResult RunMatrix(const ExperimentPlan& plan) {
  MatrixResult result;
  const Clock::time_point start = Clock::now();
  RunSettings settings;
  settings.jobs = Jobs();
  settings.write_bundles = false;
  absl::StatusOr<std::vector<CellSummary>> cells = RunExperiment(plan, settings);
  result.elapsed_s = Seconds(start);
  if (!cells.ok()) {
    result.status = cells.status();
    return result;
  }
  result.comparison = Compare(*cells);
  return result;
}

const ComparisonRow* Row(const Comparison& c, const std::string& config,
                         const std::string& allocator) {
  for (const ComparisonRow& r : c.rows) {
    if (r.info.config == config && r.info.allocator == allocator) return &r;
  }
  return nullptr;
}

std::vector<std::string> Configs(const ExperimentPlan& plan) {
  std::vector<std::string> out;
  for (const ExperimentConfig& c : plan.configs) out.push_back(c.label);
  return out;
}

Outcome ClosedLoop(const ExperimentPlan& plan, const MatrixResult& m) {
  if (!m.status.ok()) return {false, std::string(m.status.message())};
  Notes notes;
  for (const std::string& config : Configs(plan)) {
    const ComparisonRow* sara = Row(m.comparison, config, "sara");
    if (sara == nullptr || sara->repetitions != kSeeds) {
      notes.Add(false, config + ": missing sara cells");
      continue;
    }
    const double share = sara->mean_elapsed.count() /
                         static_cast<double>(sara->info.deadline.count());
    notes.Add(sara->hit_ratio >= kMinHitRatio && share >= kMinElapsedShare,
              absl::StrCat(config, " hit ", Fmt(sara->hit_ratio), " elapsed/deadline ",
                           Fmt(share)));
  }
  notes.Add(m.elapsed_s < kClosedLoopBudgetS,
            absl::StrFormat("matrix %.1fs", m.elapsed_s));
  return notes.Done();
}

Outcome ThroughputOrdering(const ExperimentPlan& plan, const MatrixResult& m) {
  if (!m.status.ok()) return {false, std::string(m.status.message())};
  Notes notes;
  std::string best_config;
  double best_ratio = -1.0;
  double peak_ratio = -1.0;
  for (const std::string& config : Configs(plan)) {
    const ComparisonRow* sara = Row(m.comparison, config, "sara");
    const ComparisonRow* greedy = Row(m.comparison, config, "greedy");
    const ComparisonRow* tmo_low = Row(m.comparison, config, "tmo-low");
    if (!sara || !greedy || !tmo_low || greedy->nonrt_throughput <= 0.0) {
      notes.Add(false, config + ": missing cells");
      continue;
    }
    const double ratio = sara->nonrt_throughput / greedy->nonrt_throughput;
    notes.Add(sara->nonrt_throughput > greedy->nonrt_throughput &&
                  sara->nonrt_throughput > tmo_low->nonrt_throughput,
              absl::StrFormat("%s sara %.3f greedy %.3f tmo-low %.3f (x%.2f)", config,
                              sara->nonrt_throughput, greedy->nonrt_throughput,
                              tmo_low->nonrt_throughput, ratio));
    if (ratio > best_ratio) {
      best_ratio = ratio;
      best_config = config;
    }
    if (config == kPeakConfig) peak_ratio = ratio;
  }
  notes.Add(best_config == kPeakConfig, "peak at " + best_config);
  notes.Add(peak_ratio >= kMinPeakRatio,
            absl::StrFormat("%s ratio %.2f", kPeakConfig, peak_ratio));
  return notes.Done();
}

Outcome BaselineFailures(const ExperimentPlan& plan, const MatrixResult& m) {
  if (!m.status.ok()) return {false, std::string(m.status.message())};
  Notes notes;
  for (const std::string& config : Configs(plan)) {
    const ComparisonRow* sara = Row(m.comparison, config, "sara");
    const ComparisonRow* offline = Row(m.comparison, config, "offline");
    const ComparisonRow* tmo_high = Row(m.comparison, config, "tmo-high");
    if (!sara || !offline || !tmo_high) {
      notes.Add(false, config + ": missing cells");
      continue;
    }
    notes.Add(offline->hit_ratio < sara->hit_ratio &&
                  tmo_high->hit_ratio < sara->hit_ratio,
              absl::StrCat(config, " offline ", Fmt(offline->hit_ratio),
                           " tmo-high ", Fmt(tmo_high->hit_ratio), " sara ",
                           Fmt(sara->hit_ratio)));
  }
  return notes.Done();
}

Outcome SweepShape(const ExperimentPlan& plan) {
  Notes notes;
  const std::vector<double> grid = DefaultSweepGrid();
  std::vector<bool> covered_ssd(2, false);
  for (const ExperimentConfig& config : plan.configs) {
    absl::StatusOr<std::vector<SweepRow>> rows = SweepThreshold(
        config.scenario, config.scenario.primary_task(), grid,
        SweepOptions{.repetitions = kSeeds, .step_mb = 1, .jobs = Jobs()});
    if (!rows.ok()) {
      notes.Add(false, config.label + ": " + std::string(rows.status().message()));
      continue;
    }
    bool monotone = grid.front() == 10.0 && grid.back() == 90.0;
    for (size_t i = 1; i < rows->size(); ++i) {
      monotone = monotone && (*rows)[i].hit_ratio <= (*rows)[i - 1].hit_ratio &&
                 (*rows)[i].nonrt_throughput >= (*rows)[i - 1].nonrt_throughput;
    }
    covered_ssd[config.scenario.ssd.name == "fast" ? 1 : 0] = true;
    notes.Add(monotone,
              absl::StrFormat("%s hit %.3f->%.3f throughput %.3f->%.3f", config.label,
                              rows->front().hit_ratio, rows->back().hit_ratio,
                              rows->front().nonrt_throughput,
                              rows->back().nonrt_throughput));
  }
  notes.Add(covered_ssd[0] && covered_ssd[1], "both SSD presets swept");
  return notes.Done();
}

Outcome Detection(const ExperimentPlan& plan) {
  DetectionCounts total;
  std::vector<std::pair<std::string, absl::StatusOr<TaskProfile>>> runs;
  std::vector<ScenarioConfig> scenarios;
  for (const ExperimentConfig& config : plan.configs) {
    for (int64_t seed = 0; seed < kSeeds; ++seed) {
      ScenarioConfig s = config.scenario;
      s.seed = RepetitionSeed(config, seed);
      s.long_stall.probability_per_period = kInjectionProbability;
      scenarios.push_back(s);
      runs.emplace_back(config.label, absl::UnknownError("not run"));
    }
  }
  ProfileOptions options;
  options.periods = kHorizonPeriods;
  options.m_grid = {kDetectM};
  options.n_grid = {kDetectN};
  const absl::Status status = ParallelFor(runs.size(), Jobs(), [&](size_t i) {
    runs[i].second = ProfileTask(scenarios[i], scenarios[i].primary_task(), options);
    return runs[i].second.status();
  });
  if (!status.ok()) return {false, std::string(status.message())};
  std::map<std::string, DetectionCounts> per_config;
  for (const auto& [label, profile] : runs) {
    const DetectionCounts& c = profile->cells.front().counts;
    DetectionCounts& agg = per_config[label];
    for (DetectionCounts* d : {&agg, &total}) {
      d->injected += c.injected;
      d->injected_flagged += c.injected_flagged;
      d->normal += c.normal;
      d->normal_flagged += c.normal_flagged;
    }
  }
  Notes notes;
  for (const auto& [label, c] : per_config) {
    notes.Add(c.injected > 0 && c.injected_rate() >= kMinInjectedFlagged &&
                  c.normal_rate() < kMaxNormalFlagged,
              absl::StrFormat("%s injected %d/%d normal %d/%d", label,
                              c.injected_flagged, c.injected, c.normal_flagged,
                              c.normal));
  }
  return notes.Done(absl::StrFormat("(%g,%g) overall injected %.4f normal %.4f; ",
                                    kDetectM, kDetectN, total.injected_rate(),
                                    total.normal_rate()));
}

Outcome DropAblation() {
  absl::StatusOr<ExperimentPlan> plan =
      LoadPlan(test_support::TestData("../configs/long_stall_ablation.json"));
  if (!plan.ok()) return {false, std::string(plan.status().message())};
  struct Job {
    const ExperimentConfig* config;
    const AllocatorSpec* allocator;
    int64_t repetition;
    double hit = 0.0;
    CascadeStats cascades;
  };
  std::vector<Job> jobs;
  for (const ExperimentConfig& config : plan->configs) {
    if (config.scenario.long_stall.probability_per_period != kInjectionProbability ||
        config.scenario.horizon_periods != kHorizonPeriods ||
        config.repetitions != kSeeds) {
      return {false, config.label + ": ablation config drifted"};
    }
    for (const AllocatorSpec& a : config.allocators) {
      for (int64_t r = 0; r < config.repetitions; ++r) jobs.push_back({&config, &a, r});
    }
  }
  const absl::Status status = ParallelFor(jobs.size(), Jobs(), [&](size_t i) {
    Job& job = jobs[i];
    absl::StatusOr<CellRun> run = RunCell(*job.config, *job.allocator, job.repetition);
    if (!run.ok()) return run.status();
    job.hit = run->summary.row.deadline_hit_ratio;
    job.cascades =
        MeasureCascades(run->trace, job.config->scenario.primary_task());
    return absl::OkStatus();
  });
  if (!status.ok()) return {false, std::string(status.message())};

  struct Side {
    double hit = 0.0;
    int64_t misses = 0;
    int64_t events = 0;
  };
  std::map<std::string, std::pair<Side, Side>> by_config;  // drop on, drop off
  for (const Job& job : jobs) {
    auto& pair = by_config[job.config->label];
    Side& side = job.allocator->drop_enabled ? pair.first : pair.second;
    side.hit += job.hit / static_cast<double>(job.config->repetitions);
    side.misses += job.cascades.post_stall_misses;
    side.events += job.cascades.events;
  }
  Notes notes;
  for (const auto& [label, sides] : by_config) {
    const auto& [on, off] = sides;
    notes.Add(on.events > 0 && off.events > 0 && on.hit > off.hit &&
                  on.misses < off.misses,
              absl::StrFormat("%s hit %.4f vs %.4f, cascade misses %d/%d vs %d/%d",
                              label, on.hit, off.hit, on.misses, on.events,
                              off.misses, off.events));
  }
  return notes.Done("drop on vs off: ");
}

Outcome MemoryReduction(const ExperimentPlan& plan, const MatrixResult& m,
                        const Outcome& closed_loop) {
  if (!m.status.ok()) return {false, std::string(m.status.message())};
  Notes notes;
  for (const std::string& config : Configs(plan)) {
    const ComparisonRow* sara = Row(m.comparison, config, "sara");
    const ComparisonRow* greedy = Row(m.comparison, config, "greedy");
    if (!sara || !greedy) {
      notes.Add(false, config + ": missing cells");
      continue;
    }
    notes.Add(sara->mean_limit_mb < greedy->mean_limit_mb,
              absl::StrFormat("%s %.1f vs %.1f MB", config, sara->mean_limit_mb,
                              greedy->mean_limit_mb));
  }
  notes.Add(closed_loop.passed, "closed-loop criterion holds");
  return notes.Done();
}

std::map<fs::path, std::string> ReadTree(const fs::path& root) {
  std::map<fs::path, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    files[fs::relative(entry.path(), root)] =
        ReadTextFile(entry.path()).value_or("<unreadable>");
  }
  return files;
}

std::string FirstLine(const std::string& text) {
  return text.substr(0, text.find('\n'));
}

Outcome DeterminismAndSchema() {
  test_support::ScratchDir first("acceptance-a");
  test_support::ScratchDir second("acceptance-b");
  absl::StatusOr<ExperimentPlan> plan = ParsePlan(R"({
      "memory_fraction": [0.6, 0.8], "ssd": "fast", "repetitions": 2,
      "interval_trace": "all", "scenario": {"horizon_periods": 40}})");
  if (!plan.ok()) return {false, std::string(plan.status().message())};
  // Different worker counts must not change a byte.
  for (auto [dir, jobs] : {std::pair{&first, 1}, std::pair{&second, Jobs() + 2}}) {
    RunSettings settings;
    settings.jobs = jobs;
    settings.output_dir = dir->path();
    if (absl::StatusOr<std::vector<CellSummary>> cells = RunExperiment(*plan, settings);
        !cells.ok()) {
      return {false, std::string(cells.status().message())};
    }
  }
  const std::map<fs::path, std::string> a = ReadTree(first.path());
  const std::map<fs::path, std::string> b = ReadTree(second.path());
  Notes notes;
  notes.Add(!a.empty() && a == b,
            absl::StrFormat("%d files, byte-identical across runs", a.size()));

  const std::map<std::string, std::string> golden = test_support::GoldenHeaders();
  std::map<std::string, int64_t> checked;
  bool headers_ok = golden.size() == 7;
  for (const auto& [path, text] : a) {
    const std::string name = path.filename().string();
    std::string kind;
    if (name.starts_with("periods-")) kind = "periods";
    if (name == "intervals.csv") kind = "intervals";
    if (name == "memory.csv") kind = "memory";
    if (kind.empty()) continue;
    headers_ok = headers_ok && golden.count(kind) && FirstLine(text) == golden.at(kind);
    ++checked[kind];
  }
  absl::StatusOr<std::vector<CellSummary>> cells =
      [&]() -> absl::StatusOr<std::vector<CellSummary>> {
    std::vector<std::string> problems;
    const std::vector<fs::path> roots = {first.path()};
    std::vector<CellSummary> loaded = LoadCells(roots, &problems);
    if (!problems.empty()) return absl::DataLossError(problems.front());
    return loaded;
  }();
  if (!cells.ok()) return {false, std::string(cells.status().message())};
  const std::vector<SweepRow> sweep = {{.threshold_pct = 10}};
  TaskProfile profile;
  const std::map<std::string, std::string> rendered = {
      {"summary", RenderSummaryTableCsv(*cells)},
      {"comparison", RenderComparisonCsv(Compare(*cells))},
      {"sweep", RenderSweepCsv(sweep)},
      {"separation", RenderSeparationCsv(profile)},
  };
  for (const auto& [kind, text] : rendered) {
    headers_ok = headers_ok && golden.count(kind) && FirstLine(text) == golden.at(kind);
    ++checked[kind];
  }
  headers_ok = headers_ok && checked.size() == golden.size();
  notes.Add(headers_ok, absl::StrFormat("%d header kinds match golden schema v%d",
                                        checked.size(), kCsvSchemaVersion));
  return notes.Done();
}

Outcome CgroupParsing() {
  Notes notes;
  const fs::path fixture =
      test_support::TestData("fixtures/pressure/example.pressure");
  absl::StatusOr<cgroup::PressureFile> parsed = cgroup::ReadPressureFile(fixture);
  absl::StatusOr<std::string> raw = ReadTextFile(fixture);
  notes.Add(parsed.ok() && raw.ok() && parsed->some.total == Micros(10'000) &&
                parsed->full.has_value() && parsed->full->total == Micros(8'000) &&
                cgroup::RenderPressure(*parsed) == *raw,
            "fixture parses to 10000/8000 and renders back byte-identical");

  std::mt19937_64 rng(2026);
  std::uniform_int_distribution<int> hundredths(0, 10'000);
  std::uniform_int_distribution<int64_t> total(0, int64_t{1} << 48);
  bool round_trip = true;
  for (int i = 0; i < 1000; ++i) {
    cgroup::PressureFile file;
    file.some = {.line_kind = cgroup::LineKind::kSome,
                 .avg10 = hundredths(rng) / 100.0,
                 .avg60 = hundredths(rng) / 100.0,
                 .avg300 = hundredths(rng) / 100.0,
                 .total = Micros(total(rng))};
    if (i % 2 == 0) {
      file.full = file.some;
      file.full->line_kind = cgroup::LineKind::kFull;
    }
    absl::StatusOr<cgroup::PressureFile> again =
        cgroup::ParsePressure(cgroup::RenderPressure(file));
    round_trip = round_trip && again.ok() && *again == file;
  }
  notes.Add(round_trip, "1000 random readings round-trip");

  const Micros l(5000);
  cgroup::StallDeltaTracker tracker(Micros(0), Micros(0));
  const cgroup::BackendSample delta = tracker.Update(Micros(3000), Micros(4500), l);
  const cgroup::BackendSample idle = tracker.Update(Micros(3000), Micros(4500), l);
  const cgroup::BackendSample clamped = tracker.Update(Micros(10'000), Micros(4500), l);
  notes.Add(delta.sample.s_mem == Micros(3000) && delta.sample.s_io == Micros(4500) &&
                idle.sample.s_mem == Micros(0) && idle.sample.s_io == Micros(0) &&
                clamped.sample.s_mem == l,
            "deltas 3000/4500, idle 0/0, 7000 clamps to 5000");

  std::uniform_int_distribution<int64_t> advance(0, 15'000);
  cgroup::StallDeltaTracker prop(Micros(0), Micros(0));
  Micros mem(0), io(0), mem_sum(0), io_sum(0);
  bool bounded = true;
  for (int k = 0; k < 5000; ++k) {
    mem += Micros(advance(rng));
    io += Micros(advance(rng));
    const cgroup::BackendSample s = prop.Update(mem, io, l);
    bounded = bounded && !s.reset && s.sample.s_mem <= l && s.sample.s_io <= l;
    mem_sum += s.sample.s_mem;
    io_sum += s.sample.s_io;
  }
  notes.Add(bounded && mem_sum + prop.pending_mem() == mem &&
                io_sum + prop.pending_io() == io,
            "5000 samples bounded by l_intv and conserve the counter advance");
  return notes.Done();
}

}  // namespace
}  // namespace stallsim::acceptance

int main() {
  using namespace stallsim;
  using namespace stallsim::acceptance;
  absl::StatusOr<harness::ExperimentPlan> plan = harness::DefaultPlan();
  if (!plan.ok()) {
    std::cerr << "cannot build default plan: " << plan.status() << "\n";
    return 2;
  }
  for (const harness::ExperimentConfig& c : plan->configs) {
    if (c.scenario.horizon_periods != kHorizonPeriods || c.repetitions != kSeeds) {
      std::cerr << "default plan drifted from " << kHorizonPeriods << " periods x "
                << kSeeds << " seeds\n";
      return 2;
    }
  }

  int failures = 0;
  auto report = [&](int id, const Outcome& o) {
    std::cout << (o.passed ? "PASS" : "FAIL") << " criterion " << id << ": "
              << o.detail << std::endl;
    failures += o.passed ? 0 : 1;
  };

  report(1, FormulaExactness());
  report(2, Linearity(plan->configs.front().scenario));
  const MatrixResult matrix = RunMatrix(*plan);
  const Outcome closed_loop = ClosedLoop(*plan, matrix);
  report(3, closed_loop);
  report(4, ThroughputOrdering(*plan, matrix));
  report(5, BaselineFailures(*plan, matrix));
  report(6, SweepShape(*plan));
  report(7, Detection(*plan));
  report(8, DropAblation());
  report(9, MemoryReduction(*plan, matrix, closed_loop));
  report(10, DeterminismAndSchema());
  report(11, CgroupParsing());

  std::cout << (failures == 0 ? "all criteria passed"
                              : absl::StrCat(failures, " criteria failed"))
            << std::endl;
  return failures == 0 ? 0 : 1;
}
