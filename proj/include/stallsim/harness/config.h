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


#ifndef STALLSIM_HARNESS_CONFIG_H_
#define STALLSIM_HARNESS_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "stallsim/baselines.h"
#include "stallsim/scenario.h"

namespace stallsim::harness {

enum class AllocatorKind { kSara, kGreedy, kOffline, kTmoLow, kTmoHigh };

std::string_view AllocatorKindName(AllocatorKind kind);
absl::StatusOr<AllocatorKind> ParseAllocatorKind(std::string_view name);

struct AllocatorSpec {
  AllocatorKind kind = AllocatorKind::kSara;
  // Distinguishes variants of one kind in output paths; defaults to the kind
  // name.
  std::string label;
  // sara
  bool drop_enabled = true;
  std::optional<double> base_unit_x_mb;
  double long_stall_m = 80.0;
  double long_stall_n = 90.0;
  // tmo-low uses this directly; tmo-high searches its threshold.
  baselines::TmoConfig tmo;
};

// Which repetitions write the full-resolution per-interval CSV.
enum class IntervalTrace { kNone, kFirst, kAll };

// One cell of the experiment matrix: a single memory size and SSD.
struct ExperimentConfig {
  std::string label;
  ScenarioConfig scenario;
  std::vector<AllocatorSpec> allocators;
  double memory_fraction = 0.6;
  int64_t repetitions = 5;
  std::filesystem::path output_dir = "results";
  IntervalTrace interval_trace = IntervalTrace::kFirst;

  absl::Status Validate() const;
};

struct ExperimentPlan {
  std::string name;
  std::vector<ExperimentConfig> configs;
  // Percent thresholds for the sweep subcommand.
  std::vector<double> sweep_grid;
};

// Workload, SSD, and scenario defaults compiled in from data/presets.json.
std::string_view PresetsJson();
absl::StatusOr<TaskSpec> PresetTask(std::string_view name);
absl::StatusOr<SsdProfile> PresetSsd(std::string_view name);
// Scenario defaults with no tasks, SSD, or memory size.
absl::StatusOr<ScenarioConfig> PresetScenario();

// total = fraction * sum of task peak working sets, rounded to whole MB.
int64_t TotalMemoryMb(const std::vector<TaskSpec>& tasks, double fraction);

// Parses an experiment file. Every field is optional; "{}" yields the
// sphinx + graphchi matrix over 60%/80% memory and slow/fast SSDs with all
// five allocators. Errors name the offending field path.
absl::StatusOr<ExperimentPlan> ParsePlan(std::string_view json_text);
absl::StatusOr<ExperimentPlan> LoadPlan(const std::filesystem::path& path);

// ParsePlan("{}").
absl::StatusOr<ExperimentPlan> DefaultPlan();

// The 10%..90% grid in steps of 10.
std::vector<double> DefaultSweepGrid();

}  // namespace stallsim::harness

#endif  // STALLSIM_HARNESS_CONFIG_H_
