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


#include "stallsim/harness/config.h"

#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "nlohmann/json.hpp"
#include "support/scenarios.h"

namespace stallsim::harness {
namespace {

using ::testing::ElementsAre;
using ::testing::HasSubstr;

std::string ErrorOf(std::string_view text) {
  absl::StatusOr<ExperimentPlan> plan = ParsePlan(text);
  EXPECT_FALSE(plan.ok()) << text;
  return plan.ok() ? "" : std::string(plan.status().message());
}

TEST(PresetsTest, WorkloadTableValues) {
  absl::StatusOr<TaskSpec> sphinx = PresetTask("sphinx");
  ASSERT_TRUE(sphinx.ok());
  EXPECT_TRUE(sphinx->soft_rt());
  EXPECT_EQ(sphinx->deadline, Micros(1'500'000));
  EXPECT_EQ(sphinx->t_bcet, Micros(480'000));
  EXPECT_EQ(sphinx->working_set.min_mb, 136);
  EXPECT_EQ(sphinx->working_set.avg_mb, 281);
  EXPECT_EQ(sphinx->working_set.max_mb, 338);

  absl::StatusOr<TaskSpec> opencv = PresetTask("opencv");
  ASSERT_TRUE(opencv.ok());
  EXPECT_EQ(opencv->deadline, Micros(800'000));
  EXPECT_EQ(opencv->t_bcet, Micros(140'000));
  EXPECT_EQ(opencv->working_set.min_mb, 97);
  EXPECT_EQ(opencv->working_set.avg_mb, 166);
  EXPECT_EQ(opencv->working_set.max_mb, 183);

  absl::StatusOr<TaskSpec> graphchi = PresetTask("graphchi");
  ASSERT_TRUE(graphchi.ok());
  EXPECT_FALSE(graphchi->soft_rt());
  EXPECT_EQ(graphchi->working_set.min_mb, 36);
  EXPECT_EQ(graphchi->working_set.avg_mb, 244);
  EXPECT_EQ(graphchi->working_set.max_mb, 272);
  EXPECT_GT(graphchi->work_unit, Micros(0));
}

TEST(PresetsTest, PresetsAreValid) {
  for (std::string_view name : {"sphinx", "opencv", "graphchi"}) {
    absl::StatusOr<TaskSpec> t = PresetTask(name);
    ASSERT_TRUE(t.ok()) << name;
    EXPECT_TRUE(t->Validate().ok()) << name;
    EXPECT_EQ(t->name, name);
  }
  for (std::string_view name : {"slow", "fast"}) {
    absl::StatusOr<SsdProfile> ssd = PresetSsd(name);
    ASSERT_TRUE(ssd.ok()) << name;
    EXPECT_TRUE(ssd->Validate().ok()) << name;
  }
  EXPECT_GT(PresetSsd("fast")->read_bw, PresetSsd("slow")->read_bw);
}

TEST(PresetsTest, EmbeddedTextMatchesDataFile) {
  absl::StatusOr<std::string> on_disk_text = [] () -> absl::StatusOr<std::string> {
    std::ifstream in(test_support::TestData("../data/presets.json"));
    if (!in) return absl::NotFoundError("presets.json");
    return std::string(std::istreambuf_iterator<char>(in), {});
  }();
  ASSERT_TRUE(on_disk_text.ok());
  EXPECT_EQ(nlohmann::json::parse(*on_disk_text),
            nlohmann::json::parse(PresetsJson()));
}

TEST(PresetsTest, ScenarioDefaults) {
  absl::StatusOr<ScenarioConfig> s = PresetScenario();
  ASSERT_TRUE(s.ok());
  EXPECT_EQ(s->l_intv, Micros(5000));
  EXPECT_EQ(s->horizon_periods, 500);
  EXPECT_EQ(s->t_drop, Micros(10'000));
  EXPECT_EQ(s->stall_attribution.mem_fraction, 1.0);
  EXPECT_EQ(s->stall_attribution.io_fraction, 0.7);
  EXPECT_EQ(s->long_stall.probability_per_period, 0.0);
}

TEST(PresetsTest, UnknownNames) {
  EXPECT_EQ(PresetTask("vim").status().code(), absl::StatusCode::kNotFound);
  EXPECT_FALSE(PresetSsd("floppy").ok());
}

TEST(TotalMemoryTest, FractionOfPeakSum) {
  const std::vector<TaskSpec> tasks = {*PresetTask("sphinx"), *PresetTask("graphchi")};
  EXPECT_EQ(TotalMemoryMb(tasks, 0.6), 366);
  EXPECT_EQ(TotalMemoryMb(tasks, 0.8), 488);
  EXPECT_EQ(TotalMemoryMb(tasks, 1.0), 610);
}

TEST(AllocatorKindTest, NamesRoundTrip) {
  for (AllocatorKind k : {AllocatorKind::kSara, AllocatorKind::kGreedy,
                          AllocatorKind::kOffline, AllocatorKind::kTmoLow,
                          AllocatorKind::kTmoHigh}) {
    absl::StatusOr<AllocatorKind> parsed = ParseAllocatorKind(AllocatorKindName(k));
    ASSERT_TRUE(parsed.ok());
    EXPECT_EQ(*parsed, k);
  }
  EXPECT_EQ(AllocatorKindName(AllocatorKind::kTmoHigh), "tmo-high");
  EXPECT_FALSE(ParseAllocatorKind("tmo").ok());
}

TEST(DefaultPlanTest, FourConfigsFiveAllocators) {
  absl::StatusOr<ExperimentPlan> plan = DefaultPlan();
  ASSERT_TRUE(plan.ok()) << plan.status();
  ASSERT_EQ(plan->configs.size(), 4u);
  std::vector<std::string> labels;
  for (const ExperimentConfig& c : plan->configs) {
    labels.push_back(c.label);
    EXPECT_EQ(c.allocators.size(), 5u);
    EXPECT_EQ(c.repetitions, 5);
    EXPECT_EQ(c.scenario.horizon_periods, 500);
    ASSERT_EQ(c.scenario.tasks.size(), 2u);
    EXPECT_EQ(c.scenario.tasks[0].name, "sphinx");
    EXPECT_EQ(c.scenario.tasks[1].name, "graphchi");
    EXPECT_EQ(c.scenario.total_memory_mb,
              TotalMemoryMb(c.scenario.tasks, c.memory_fraction));
    EXPECT_TRUE(c.Validate().ok());
  }
  EXPECT_THAT(labels, ElementsAre("mem60-slow", "mem60-fast", "mem80-slow",
                                  "mem80-fast"));
  EXPECT_EQ(plan->sweep_grid, DefaultSweepGrid());
  EXPECT_THAT(DefaultSweepGrid(),
              ElementsAre(10, 20, 30, 40, 50, 60, 70, 80, 90));
}

TEST(ParsePlanTest, OverridesAndVariants) {
  absl::StatusOr<ExperimentPlan> plan = ParsePlan(R"({
    "name": "ablation",
    "tasks": [{"preset": "opencv", "demand_jitter": 0.25}, "graphchi"],
    "memory_fraction": 0.7,
    "ssd": {"preset": "fast", "name": "nvme", "per_op_latency_us": 12},
    "repetitions": 2,
    "scenario": {"horizon_periods": 50, "seed": 9,
                 "long_stall": {"probability_per_period": 0.02}},
    "allocators": ["sara",
                   {"kind": "sara", "label": "sara-nodrop", "drop_enabled": false},
                   {"kind": "tmo-low", "psi_threshold": 0.5, "window_us": 1000000}],
    "interval_trace": "none",
    "output_dir": "out/ablation"
  })");
  ASSERT_TRUE(plan.ok()) << plan.status();
  EXPECT_EQ(plan->name, "ablation");
  ASSERT_EQ(plan->configs.size(), 1u);
  const ExperimentConfig& c = plan->configs[0];
  EXPECT_EQ(c.label, "mem70-nvme");
  EXPECT_EQ(c.scenario.tasks[0].name, "opencv");
  EXPECT_EQ(c.scenario.tasks[0].demand_jitter, 0.25);
  EXPECT_EQ(c.scenario.ssd.per_op_latency, Micros(12));
  EXPECT_EQ(c.scenario.ssd.read_bw, PresetSsd("fast")->read_bw);
  EXPECT_EQ(c.scenario.horizon_periods, 50);
  EXPECT_EQ(c.scenario.seed, 9u);
  EXPECT_EQ(c.scenario.long_stall.probability_per_period, 0.02);
  EXPECT_EQ(c.scenario.long_stall.min_duration, Micros(1'500'000));
  EXPECT_EQ(c.repetitions, 2);
  EXPECT_EQ(c.interval_trace, IntervalTrace::kNone);
  EXPECT_EQ(c.output_dir, "out/ablation");
  ASSERT_EQ(c.allocators.size(), 3u);
  EXPECT_EQ(c.allocators[1].label, "sara-nodrop");
  EXPECT_FALSE(c.allocators[1].drop_enabled);
  EXPECT_EQ(c.allocators[2].kind, AllocatorKind::kTmoLow);
  EXPECT_EQ(c.allocators[2].tmo.psi_threshold, 0.5);
  EXPECT_EQ(c.allocators[2].tmo.window, Micros(1'000'000));
}

TEST(ParsePlanTest, CartesianExpansionOrder) {
  absl::StatusOr<ExperimentPlan> plan =
      ParsePlan(R"({"memory_fraction": [0.5, 0.9], "ssd": ["fast", "slow"]})");
  ASSERT_TRUE(plan.ok());
  std::vector<std::string> labels;
  for (const ExperimentConfig& c : plan->configs) labels.push_back(c.label);
  EXPECT_THAT(labels, ElementsAre("mem50-fast", "mem50-slow", "mem90-fast",
                                  "mem90-slow"));
}

TEST(ParsePlanTest, FieldPathsInErrors) {
  EXPECT_EQ(ErrorOf(R"({"bogus": 1})"), "bogus: unknown field");
  EXPECT_EQ(ErrorOf(R"({"scenario": {"l_intv_us": "x"}})"),
            "scenario.l_intv_us: expected an integer");
  EXPECT_EQ(ErrorOf(R"({"memory_fraction": [0.6, 1.5]})"),
            "memory_fraction[1]: must be in (0, 1]");
  EXPECT_EQ(ErrorOf(R"({"allocators": [{"kind": "sara", "psi_threshold": 1}]})"),
            "allocators[0].psi_threshold: unknown field");
  EXPECT_EQ(ErrorOf(R"({"sweep_grid": [0]})"),
            "sweep_grid[0]: must be in (0, 100]");
  EXPECT_EQ(ErrorOf(R"({"repetitions": 0})"), "repetitions: must be at least 1");
  EXPECT_EQ(ErrorOf(R"({"allocators": ["sara", "sara"]})"),
            "allocators[1]: duplicate label \"sara\"");
  EXPECT_THAT(ErrorOf(R"({"tasks": ["nope"]})"), HasSubstr("tasks[0]"));
  EXPECT_THAT(ErrorOf(R"({"tasks": [{"preset": "sphinx", "period_us": -5}]})"),
              HasSubstr("tasks[0]"));
  EXPECT_THAT(ErrorOf(R"({"allocators": ["sara", "quantum"]})"),
              HasSubstr("allocators[1]"));
  EXPECT_THAT(ErrorOf(R"({"ssd": {"preset": "slow", "read_bw": 0}})"),
              HasSubstr("ssd"));
  EXPECT_THAT(ErrorOf(R"({"interval_trace": "most"})"),
              HasSubstr("interval_trace"));
}

TEST(ParsePlanTest, StructuralErrors) {
  EXPECT_EQ(ErrorOf("{"), "config: malformed JSON");
  EXPECT_EQ(ErrorOf("[1]"), "config: expected an object");
  EXPECT_THAT(ErrorOf(R"({"tasks": []})"), HasSubstr("tasks"));
  EXPECT_THAT(ErrorOf(R"({"allocators": []})"), HasSubstr("allocators"));
  EXPECT_THAT(ErrorOf(R"({"tasks": ["graphchi"]})"), HasSubstr("soft RT"));
}

TEST(LoadPlanTest, PrefixesPath) {
  test_support::ScratchDir dir("config");
  const std::filesystem::path path = dir.path() / "bad.json";
  std::ofstream(path) << R"({"bogus": true})";
  absl::StatusOr<ExperimentPlan> plan = LoadPlan(path);
  ASSERT_FALSE(plan.ok());
  EXPECT_EQ(plan.status().message(), path.string() + ": bogus: unknown field");
}

TEST(LoadPlanTest, MissingFile) {
  absl::StatusOr<ExperimentPlan> plan = LoadPlan("/nonexistent/plan.json");
  ASSERT_FALSE(plan.ok());
  EXPECT_EQ(plan.status().code(), absl::StatusCode::kNotFound);
  EXPECT_THAT(plan.status().message(), HasSubstr("/nonexistent/plan.json"));
}

TEST(LoadPlanTest, ShippedConfigsParse) {
  for (const char* name : {"matrix.json", "long_stall_ablation.json", "smoke.json"}) {
    absl::StatusOr<ExperimentPlan> plan =
        LoadPlan(test_support::TestData("../configs") / name);
    EXPECT_TRUE(plan.ok()) << name << ": " << plan.status();
  }
}

TEST(ExperimentConfigTest, ValidateRejectsUnknownState) {
  ExperimentConfig c = DefaultPlan()->configs[0];
  EXPECT_TRUE(c.Validate().ok());
  c.memory_fraction = 0.0;
  EXPECT_FALSE(c.Validate().ok());
  c = DefaultPlan()->configs[0];
  c.allocators.clear();
  EXPECT_FALSE(c.Validate().ok());
}

}  // namespace
}  // namespace stallsim::harness
