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


#include "stallsim/harness/bundle.h"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <system_error>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "nlohmann/json.hpp"
#include "src/harness/absl_view.h"
#include "stallsim/metrics.h"

namespace stallsim::harness {
namespace {

using OrderedJson = nlohmann::ordered_json;

// Splits CSV text into rows after checking the header. Blank trailing lines
// are ignored.
absl::StatusOr<std::vector<std::vector<absl::string_view>>> SplitCsv(
    absl::string_view text, absl::string_view header, size_t columns) {
  std::vector<absl::string_view> lines = absl::StrSplit(text, '\n');
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty() || lines.front() != header) {
    return absl::InvalidArgumentError(
        absl::StrCat("unexpected CSV header; want \"", header, "\""));
  }
  std::vector<std::vector<absl::string_view>> rows;
  for (size_t i = 1; i < lines.size(); ++i) {
    std::vector<absl::string_view> cells = absl::StrSplit(lines[i], ',');
    if (cells.size() != columns) {
      return absl::InvalidArgumentError(absl::StrCat(
          "line ", i + 1, ": expected ", columns, " columns, got ",
          cells.size()));
    }
    rows.push_back(std::move(cells));
  }
  return rows;
}

absl::Status ParseInt(absl::string_view cell, size_t line, int64_t* out) {
  if (!absl::SimpleAtoi(cell, out)) {
    return absl::InvalidArgumentError(
        absl::StrCat("line ", line, ": bad integer \"", cell, "\""));
  }
  return absl::OkStatus();
}

absl::Status ParseBool01(absl::string_view cell, size_t line, bool* out) {
  if (cell != "0" && cell != "1") {
    return absl::InvalidArgumentError(
        absl::StrCat("line ", line, ": expected 0 or 1, got \"", cell, "\""));
  }
  *out = cell == "1";
  return absl::OkStatus();
}

}  // namespace

SummaryRow Summarize(std::string_view allocator,
                     std::span<const PeriodRecord> periods,
                     std::span<const WindowRecord> primary_windows,
                     std::span<const WindowRecord> nonrt_windows,
                     Micros l_intv, Micros work_unit) {
  SummaryRow row;
  row.allocator = std::string(allocator);
  row.periods = static_cast<int64_t>(periods.size());
  int64_t met = 0;
  double elapsed = 0.0;
  for (const PeriodRecord& p : periods) {
    met += p.deadline_met ? 1 : 0;
    row.drop_count += p.dropped ? 1 : 0;
    elapsed += static_cast<double>(p.elapsed.count());
  }
  if (!periods.empty()) {
    const double n = static_cast<double>(periods.size());
    row.deadline_hit_ratio = static_cast<double>(met) / n;
    row.mean_elapsed = MicrosF(elapsed / n);
  }

  int64_t intervals = 0;
  int64_t limit_sum = 0;
  for (const WindowRecord& w : primary_windows) {
    intervals += w.intervals;
    limit_sum += w.limit_mb_sum;
  }
  if (intervals > 0) {
    row.mean_soft_rt_limit_mb =
        static_cast<double>(limit_sum) / static_cast<double>(intervals);
  }

  int64_t nonrt_intervals = 0;
  Micros nonrt_stall{0};
  for (const WindowRecord& w : nonrt_windows) {
    nonrt_intervals += w.intervals;
    nonrt_stall += w.s_intv_sum;
  }
  if (nonrt_intervals > 0 && work_unit > Micros::zero()) {
    const Micros span = l_intv * nonrt_intervals;
    const Micros work = span - nonrt_stall;
    const double units = static_cast<double>(work.count()) /
                         static_cast<double>(work_unit.count());
    row.nonrt_throughput = units / ToSeconds(span);
  }
  return row;
}

std::string RenderPeriodsCsv(std::span<const PeriodRecord> periods) {
  std::string out = absl::StrCat(kPeriodsHeader, "\n");
  for (const PeriodRecord& p : periods) {
    absl::StrAppend(&out, p.period_index, ",", p.t_wait.count(), ",",
                    p.t_exec.count(), ",", p.elapsed.count(), ",",
                    p.s_period.count(), ",", p.deadline_met ? 1 : 0, ",",
                    p.dropped ? 1 : 0, "\n");
  }
  return out;
}

std::string RenderIntervalsCsv(const TraceLog& trace) {
  std::string out = absl::StrCat(kIntervalsHeader, "\n");
  for (const IntervalRecord& r : trace.intervals) {
    absl::StrAppend(&out, r.time.count(), ",", trace.task_names[r.task], ",",
                    r.sample.s_mem.count(), ",", r.sample.s_io.count(), ",",
                    metrics::IntervalStall(r.sample).count(), ",", r.limit_mb,
                    "\n");
  }
  return out;
}

std::string RenderMemoryCsv(const TraceLog& trace) {
  std::string out = absl::StrCat(kMemoryHeader, "\n");
  for (const WindowRecord& w : trace.windows) {
    absl::StrAppend(&out, w.window_index, ",", trace.task_names[w.task], ",",
                    w.intervals, ",", w.limit_mb_sum, ",", w.resident_mb_sum,
                    ",", w.s_intv_sum.count(), "\n");
  }
  return out;
}

std::string RenderSummaryJson(const CellSummary& cell) {
  const CellInfo& i = cell.info;
  const SummaryRow& r = cell.row;
  OrderedJson j;
  j["csv_schema_version"] = kCsvSchemaVersion;
  j["config"] = i.config;
  j["allocator"] = i.allocator;
  j["allocator_kind"] = i.allocator_kind;
  j["seed"] = i.seed;
  j["memory_fraction"] = i.memory_fraction;
  j["total_memory_mb"] = i.total_memory_mb;
  j["ssd"] = i.ssd;
  j["ssd_read_bw"] = i.ssd_read_bw;
  j["drop_enabled"] = i.drop_enabled;
  j["long_stall_probability"] = i.long_stall_probability;
  j["task"] = i.task;
  j["nonrt_task"] = i.nonrt_task;
  j["deadline_us"] = i.deadline.count();
  j["l_intv_us"] = i.l_intv.count();
  j["work_unit_us"] = i.work_unit.count();
  j["horizon_periods"] = i.horizon_periods;
  OrderedJson stats;
  stats["periods"] = r.periods;
  stats["deadline_hit_ratio"] = r.deadline_hit_ratio;
  stats["nonrt_throughput"] = r.nonrt_throughput;
  stats["mean_elapsed_us"] = r.mean_elapsed.count();
  stats["drop_count"] = r.drop_count;
  stats["mean_soft_rt_limit_mb"] = r.mean_soft_rt_limit_mb;
  j["stats"] = stats;
  return j.dump(2) + "\n";
}

std::string RenderSummaryTableCsv(std::span<const CellSummary> cells) {
  std::string out = absl::StrCat(kSummaryHeader, "\n");
  for (const CellSummary& c : cells) {
    absl::StrAppendFormat(&out, "%s,%s,%d,%.6f,%.6f,%.1f,%d,%.3f\n",
                          c.info.config, c.info.allocator, c.info.seed,
                          c.row.deadline_hit_ratio, c.row.nonrt_throughput,
                          c.row.mean_elapsed.count(), c.row.drop_count,
                          c.row.mean_soft_rt_limit_mb);
  }
  return out;
}

std::string RenderSummaryTableJson(std::span<const CellSummary> cells) {
  OrderedJson rows = OrderedJson::array();
  for (const CellSummary& c : cells) {
    rows.push_back(OrderedJson::parse(RenderSummaryJson(c)));
  }
  return rows.dump(2) + "\n";
}

absl::StatusOr<std::vector<PeriodRecord>> ParsePeriodsCsv(
    std::string_view text) {
  absl::StatusOr<std::vector<std::vector<absl::string_view>>> rows =
      SplitCsv(AbslView(text), kPeriodsHeader, 7);
  if (!rows.ok()) return rows.status();
  std::vector<PeriodRecord> out;
  out.reserve(rows->size());
  for (size_t i = 0; i < rows->size(); ++i) {
    const std::vector<absl::string_view>& c = (*rows)[i];
    const size_t line = i + 2;
    PeriodRecord p;
    int64_t v[5];
    for (int k = 0; k < 5; ++k) {
      if (absl::Status s = ParseInt(c[k], line, &v[k]); !s.ok()) return s;
    }
    p.period_index = v[0];
    p.t_wait = Micros(v[1]);
    p.t_exec = Micros(v[2]);
    p.elapsed = Micros(v[3]);
    p.s_period = Micros(v[4]);
    if (absl::Status s = ParseBool01(c[5], line, &p.deadline_met); !s.ok()) {
      return s;
    }
    if (absl::Status s = ParseBool01(c[6], line, &p.dropped); !s.ok()) {
      return s;
    }
    out.push_back(p);
  }
  return out;
}

absl::StatusOr<std::vector<WindowRecord>> ParseMemoryCsv(
    std::string_view text, std::vector<std::string>* task_names) {
  absl::StatusOr<std::vector<std::vector<absl::string_view>>> rows =
      SplitCsv(AbslView(text), kMemoryHeader, 6);
  if (!rows.ok()) return rows.status();
  std::vector<WindowRecord> out;
  out.reserve(rows->size());
  for (size_t i = 0; i < rows->size(); ++i) {
    const std::vector<absl::string_view>& c = (*rows)[i];
    const size_t line = i + 2;
    WindowRecord w;
    int64_t stall = 0;
    absl::Status s = ParseInt(c[0], line, &w.window_index);
    if (s.ok()) s = ParseInt(c[2], line, &w.intervals);
    if (s.ok()) s = ParseInt(c[3], line, &w.limit_mb_sum);
    if (s.ok()) s = ParseInt(c[4], line, &w.resident_mb_sum);
    if (s.ok()) s = ParseInt(c[5], line, &stall);
    if (!s.ok()) return s;
    w.s_intv_sum = Micros(stall);
    const std::string task(c[1]);
    auto it = std::find(task_names->begin(), task_names->end(), task);
    w.task = static_cast<size_t>(it - task_names->begin());
    if (it == task_names->end()) task_names->push_back(task);
    out.push_back(w);
  }
  return out;
}

absl::StatusOr<CellSummary> ParseSummaryJson(std::string_view text) {
  const OrderedJson j = OrderedJson::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    return absl::InvalidArgumentError("summary.json: malformed JSON");
  }
  CellSummary cell;
  try {
    if (j.at("csv_schema_version").get<int>() != kCsvSchemaVersion) {
      return absl::FailedPreconditionError(absl::StrCat(
          "summary.json: schema version ",
          j.at("csv_schema_version").dump(), ", expected ",
          kCsvSchemaVersion));
    }
    CellInfo& i = cell.info;
    i.config = j.at("config").get<std::string>();
    i.allocator = j.at("allocator").get<std::string>();
    i.allocator_kind = j.at("allocator_kind").get<std::string>();
    i.seed = j.at("seed").get<uint64_t>();
    i.memory_fraction = j.at("memory_fraction").get<double>();
    i.total_memory_mb = j.at("total_memory_mb").get<int64_t>();
    i.ssd = j.at("ssd").get<std::string>();
    i.ssd_read_bw = j.at("ssd_read_bw").get<double>();
    i.drop_enabled = j.at("drop_enabled").get<bool>();
    i.long_stall_probability = j.at("long_stall_probability").get<double>();
    i.task = j.at("task").get<std::string>();
    i.nonrt_task = j.at("nonrt_task").get<std::string>();
    i.deadline = Micros(j.at("deadline_us").get<int64_t>());
    i.l_intv = Micros(j.at("l_intv_us").get<int64_t>());
    i.work_unit = Micros(j.at("work_unit_us").get<int64_t>());
    i.horizon_periods = j.at("horizon_periods").get<int64_t>();
    const OrderedJson& s = j.at("stats");
    SummaryRow& r = cell.row;
    r.allocator = i.allocator;
    r.periods = s.at("periods").get<int64_t>();
    r.deadline_hit_ratio = s.at("deadline_hit_ratio").get<double>();
    r.nonrt_throughput = s.at("nonrt_throughput").get<double>();
    r.mean_elapsed = MicrosF(s.at("mean_elapsed_us").get<double>());
    r.drop_count = s.at("drop_count").get<int64_t>();
    r.mean_soft_rt_limit_mb = s.at("mean_soft_rt_limit_mb").get<double>();
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("summary.json: ", e.what()));
  }
  return cell;
}

absl::Status WriteTextFile(const std::filesystem::path& path,
                           std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return absl::PermissionDeniedError(
        absl::StrCat("cannot open ", path.string(), " for writing"));
  }
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) {
    return absl::DataLossError(absl::StrCat("write failed: ", path.string()));
  }
  return absl::OkStatus();
}

absl::StatusOr<std::string> ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return absl::NotFoundError(absl::StrCat("cannot open ", path.string()));
  }
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

absl::Status WriteBundle(const std::filesystem::path& dir,
                         const TraceLog& trace, const CellSummary& cell,
                         bool with_intervals) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    return absl::PermissionDeniedError(
        absl::StrCat("cannot create ", dir.string(), ": ", ec.message()));
  }
  for (size_t t = 0; t < trace.periods.size(); ++t) {
    if (trace.periods[t].empty()) continue;
    const std::filesystem::path file =
        dir / absl::StrCat("periods-", trace.task_names[t], ".csv");
    if (absl::Status s = WriteTextFile(file, RenderPeriodsCsv(trace.periods[t]));
        !s.ok()) {
      return s;
    }
  }
  if (absl::Status s = WriteTextFile(dir / "memory.csv", RenderMemoryCsv(trace));
      !s.ok()) {
    return s;
  }
  if (with_intervals) {
    if (absl::Status s =
            WriteTextFile(dir / "intervals.csv", RenderIntervalsCsv(trace));
        !s.ok()) {
      return s;
    }
  }
  return WriteTextFile(dir / "summary.json", RenderSummaryJson(cell));
}

absl::StatusOr<CellSummary> LoadBundle(const std::filesystem::path& dir) {
  auto annotate = [&](const absl::Status& s, std::string_view file) {
    return absl::Status(s.code(), absl::StrCat((dir / file).string(), ": ",
                                               s.message()));
  };
  absl::StatusOr<std::string> summary_text = ReadTextFile(dir / "summary.json");
  if (!summary_text.ok()) return summary_text.status();
  absl::StatusOr<CellSummary> stored = ParseSummaryJson(*summary_text);
  if (!stored.ok()) return annotate(stored.status(), "summary.json");

  const std::string periods_name =
      absl::StrCat("periods-", stored->info.task, ".csv");
  absl::StatusOr<std::string> periods_text = ReadTextFile(dir / periods_name);
  if (!periods_text.ok()) return periods_text.status();
  absl::StatusOr<std::vector<PeriodRecord>> periods =
      ParsePeriodsCsv(*periods_text);
  if (!periods.ok()) return annotate(periods.status(), periods_name);

  absl::StatusOr<std::string> memory_text = ReadTextFile(dir / "memory.csv");
  if (!memory_text.ok()) return memory_text.status();
  std::vector<std::string> names;
  absl::StatusOr<std::vector<WindowRecord>> windows =
      ParseMemoryCsv(*memory_text, &names);
  if (!windows.ok()) return annotate(windows.status(), "memory.csv");

  std::vector<WindowRecord> primary;
  std::vector<WindowRecord> nonrt;
  for (const WindowRecord& w : *windows) {
    if (names[w.task] == stored->info.task) primary.push_back(w);
    if (names[w.task] == stored->info.nonrt_task) nonrt.push_back(w);
  }
  CellSummary cell;
  cell.info = stored->info;
  cell.row = Summarize(cell.info.allocator, *periods, primary, nonrt,
                       cell.info.l_intv, cell.info.work_unit);
  return cell;
}

std::vector<std::filesystem::path> FindBundles(
    const std::filesystem::path& root) {
  std::vector<std::filesystem::path> out;
  std::error_code ec;
  if (std::filesystem::is_regular_file(root / "summary.json", ec)) {
    out.push_back(root);
  }
  for (auto it = std::filesystem::recursive_directory_iterator(root, ec);
       !ec && it != std::filesystem::recursive_directory_iterator();
       it.increment(ec)) {
    if (it->is_directory(ec) &&
        std::filesystem::is_regular_file(it->path() / "summary.json", ec)) {
      out.push_back(it->path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace stallsim::harness
