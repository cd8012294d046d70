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


#ifndef STALLSIM_HARNESS_RUNNER_H_
#define STALLSIM_HARNESS_RUNNER_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "stallsim/allocator.h"
#include "stallsim/harness/bundle.h"
#include "stallsim/harness/config.h"
#include "stallsim/simulator.h"

namespace stallsim::harness {

// Builds the allocator for one cell. Offline profiles and tmo-high searches
// its threshold against `scenario`, so this can take a while.
absl::StatusOr<std::unique_ptr<Allocator>> MakeAllocator(
    const AllocatorSpec& spec, const ScenarioConfig& scenario);

// Seed of repetition `r` of a config.
uint64_t RepetitionSeed(const ExperimentConfig& config, int64_t repetition);

// Bundle directory of one cell below `root`.
std::filesystem::path CellDirectory(const std::filesystem::path& root,
                                    const ExperimentConfig& config,
                                    const AllocatorSpec& allocator,
                                    uint64_t seed);

CellInfo DescribeCell(const ExperimentConfig& config,
                      const AllocatorSpec& allocator, uint64_t seed);

struct CellRun {
  CellSummary summary;
  TraceLog trace;
};

// Runs one (config, allocator, repetition) cell in memory.
absl::StatusOr<CellRun> RunCell(const ExperimentConfig& config,
                                const AllocatorSpec& allocator,
                                int64_t repetition,
                                bool record_intervals = false);

struct RunSettings {
  int jobs = 1;
  // Overrides the base seed of every config.
  std::optional<uint64_t> seed;
  // Overrides the output directory of every config.
  std::optional<std::filesystem::path> output_dir;
  bool write_bundles = true;
};

// Runs every cell of `plan` and writes one bundle per cell. Results are in
// plan order (config, allocator, repetition) whatever the job count.
absl::StatusOr<std::vector<CellSummary>> RunExperiment(
    const ExperimentPlan& plan, const RunSettings& settings);

// Calls fn(0..count-1) on up to `jobs` threads. Returns the failure with the
// lowest index, if any.
absl::Status ParallelFor(size_t count, int jobs,
                         const std::function<absl::Status(size_t)>& fn);

}  // namespace stallsim::harness

#endif  // STALLSIM_HARNESS_RUNNER_H_
