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


#ifndef STALLSIM_HARNESS_BUNDLE_H_
#define STALLSIM_HARNESS_BUNDLE_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "stallsim/simulator.h"
#include "stallsim/units.h"

namespace stallsim::harness {

// Bumped whenever a header below changes.
inline constexpr int kCsvSchemaVersion = 1;

// periods-<task>.csv, one per soft RT task.
inline constexpr char kPeriodsHeader[] =
    "period_index,t_wait_us,t_exec_us,elapsed_us,s_period_us,deadline_met,"
    "dropped";
// intervals.csv, every task at every interval.
inline constexpr char kIntervalsHeader[] =
    "time_us,task,s_mem_us,s_io_us,s_intv_us,limit_mb";
// memory.csv, per-task totals for each primary period window.
inline constexpr char kMemoryHeader[] =
    "window_index,task,intervals,limit_mb_sum,resident_mb_sum,s_intv_us_sum";
// summary.csv at the top of a run directory, one row per cell.
inline constexpr char kSummaryHeader[] =
    "config,allocator,seed,deadline_hit_ratio,nonrt_throughput,"
    "mean_elapsed_us,drop_count,mean_soft_rt_limit_mb";

// Per-cell result statistics for the primary soft RT task.
struct SummaryRow {
  std::string allocator;
  int64_t periods = 0;
  double deadline_hit_ratio = 0.0;
  // Non-RT work units per second; 0 without a non-RT task.
  double nonrt_throughput = 0.0;
  MicrosF mean_elapsed{0.0};
  int64_t drop_count = 0;
  double mean_soft_rt_limit_mb = 0.0;

  friend bool operator==(const SummaryRow&, const SummaryRow&) = default;
};

// What produced a cell; stored in summary.json next to the statistics.
struct CellInfo {
  std::string config;
  std::string allocator;
  std::string allocator_kind;
  uint64_t seed = 0;
  double memory_fraction = 0.0;
  int64_t total_memory_mb = 0;
  std::string ssd;
  double ssd_read_bw = 0.0;
  bool drop_enabled = false;
  double long_stall_probability = 0.0;
  std::string task;
  std::string nonrt_task;
  Micros deadline{0};
  Micros l_intv{0};
  Micros work_unit{0};
  int64_t horizon_periods = 0;

  friend bool operator==(const CellInfo&, const CellInfo&) = default;
};

struct CellSummary {
  CellInfo info;
  SummaryRow row;

  friend bool operator==(const CellSummary&, const CellSummary&) = default;
};

// Statistics over the primary task's periods and the window totals.
// `primary_windows` and `nonrt_windows` hold only that task's rows.
SummaryRow Summarize(std::string_view allocator,
                     std::span<const PeriodRecord> periods,
                     std::span<const WindowRecord> primary_windows,
                     std::span<const WindowRecord> nonrt_windows,
                     Micros l_intv, Micros work_unit);

std::string RenderPeriodsCsv(std::span<const PeriodRecord> periods);
std::string RenderIntervalsCsv(const TraceLog& trace);
std::string RenderMemoryCsv(const TraceLog& trace);
std::string RenderSummaryJson(const CellSummary& cell);
std::string RenderSummaryTableCsv(std::span<const CellSummary> cells);
std::string RenderSummaryTableJson(std::span<const CellSummary> cells);

absl::StatusOr<std::vector<PeriodRecord>> ParsePeriodsCsv(std::string_view text);
// Task names are mapped to indices in order of first appearance.
absl::StatusOr<std::vector<WindowRecord>> ParseMemoryCsv(
    std::string_view text, std::vector<std::string>* task_names);
absl::StatusOr<CellSummary> ParseSummaryJson(std::string_view text);

// Writes periods-<task>.csv, memory.csv, summary.json, and intervals.csv when
// `with_intervals`, into `dir` (created if needed).
absl::Status WriteBundle(const std::filesystem::path& dir,
                         const TraceLog& trace, const CellSummary& cell,
                         bool with_intervals);

// Reads a cell directory back and recomputes its statistics from the CSVs.
absl::StatusOr<CellSummary> LoadBundle(const std::filesystem::path& dir);

// Cell directories (those holding summary.json) below `root`, sorted.
std::vector<std::filesystem::path> FindBundles(
    const std::filesystem::path& root);

absl::Status WriteTextFile(const std::filesystem::path& path,
                           std::string_view content);
absl::StatusOr<std::string> ReadTextFile(const std::filesystem::path& path);

}  // namespace stallsim::harness

#endif  // STALLSIM_HARNESS_BUNDLE_H_
