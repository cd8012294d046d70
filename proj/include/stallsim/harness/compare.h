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


#ifndef STALLSIM_HARNESS_COMPARE_H_
#define STALLSIM_HARNESS_COMPARE_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stallsim/harness/bundle.h"
#include "stallsim/harness/config.h"

namespace stallsim::harness {

// Bars for the SARA ordering checks.
inline constexpr double kMinSaraHitRatio = 0.95;
inline constexpr double kMinSaraElapsedShare = 0.8;
inline constexpr double kMinPeakThroughputRatio = 2.0;

inline constexpr char kComparisonHeader[] =
    "config,allocator,repetitions,deadline_hit_ratio,nonrt_throughput,"
    "mean_elapsed_us,drop_count,mean_soft_rt_limit_mb,ratio_vs_greedy,"
    "ratio_vs_tmo_low,hit_delta_vs_sara";

// One (config, allocator) pair averaged over its seeds; drop_count is the
// total.
struct ComparisonRow {
  CellInfo info;
  int64_t repetitions = 0;
  double hit_ratio = 0.0;
  double nonrt_throughput = 0.0;
  MicrosF mean_elapsed{0.0};
  int64_t drop_count = 0;
  double mean_limit_mb = 0.0;
  std::optional<double> ratio_vs_greedy;
  std::optional<double> ratio_vs_tmo_low;
  std::optional<double> hit_delta_vs_sara;
};

struct OrderingCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct Comparison {
  std::vector<ComparisonRow> rows;
  std::vector<OrderingCheck> checks;
  // Missing or unreadable bundles.
  std::vector<std::string> problems;

  bool all_passed() const;
};

// Groups cells by (config, allocator) in first-seen order and evaluates
// every ordering check whose inputs are present. SARA is the sara-kind
// allocator with dropping enabled; the ablation check pairs it with a
// sara-kind allocator that has dropping disabled.
Comparison Compare(std::span<const CellSummary> cells);

// Loads every bundle below `roots`, recomputing statistics from the CSVs.
// Unreadable bundles are appended to `problems`.
std::vector<CellSummary> LoadCells(std::span<const std::filesystem::path> roots,
                                   std::vector<std::string>* problems);

// Cells of `plan` without a bundle under `root`, one message per cell.
std::vector<std::string> MissingCells(const ExperimentPlan& plan,
                                      const std::filesystem::path& root);

std::string RenderComparisonCsv(const Comparison& comparison);
std::string RenderComparisonJson(const Comparison& comparison);
std::string RenderMarkdownReport(const Comparison& comparison);

}  // namespace stallsim::harness

#endif  // STALLSIM_HARNESS_COMPARE_H_
