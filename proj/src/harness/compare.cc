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


#include "stallsim/harness/compare.h"

#include <algorithm>
#include <map>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "nlohmann/json.hpp"
#include "stallsim/harness/runner.h"

namespace stallsim::harness {
namespace {

struct ConfigView {
  std::string config;
  const ComparisonRow* sara = nullptr;
  const ComparisonRow* sara_no_drop = nullptr;
  const ComparisonRow* greedy = nullptr;
  const ComparisonRow* tmo_low = nullptr;
  const ComparisonRow* tmo_high = nullptr;
  const ComparisonRow* offline = nullptr;
};

std::vector<ConfigView> ViewsByConfig(const std::vector<ComparisonRow>& rows) {
  std::vector<ConfigView> views;
  auto view_for = [&](const std::string& config) -> ConfigView& {
    for (ConfigView& v : views) {
      if (v.config == config) return v;
    }
    views.push_back(ConfigView{.config = config});
    return views.back();
  };
  for (const ComparisonRow& r : rows) {
    ConfigView& v = view_for(r.info.config);
    const std::string& kind = r.info.allocator_kind;
    auto keep_first = [&](const ComparisonRow*& slot) {
      if (slot == nullptr) slot = &r;
    };
    if (kind == "sara") {
      keep_first(r.info.drop_enabled ? v.sara : v.sara_no_drop);
    } else if (kind == "greedy") {
      keep_first(v.greedy);
    } else if (kind == "tmo-low") {
      keep_first(v.tmo_low);
    } else if (kind == "tmo-high") {
      keep_first(v.tmo_high);
    } else if (kind == "offline") {
      keep_first(v.offline);
    }
  }
  return views;
}

// Adds a check over every config where `applies` holds. Skipped entirely
// when no config qualifies.
template <typename Applies, typename Test>
void CheckEach(const std::vector<ConfigView>& views, std::string name,
               Applies applies, Test test, std::vector<OrderingCheck>* out) {
  OrderingCheck check{.name = std::move(name), .passed = true, .detail = {}};
  std::vector<std::string> notes;
  bool any = false;
  for (const ConfigView& v : views) {
    if (!applies(v)) continue;
    any = true;
    std::string note;
    const bool ok = test(v, &note);
    check.passed = check.passed && ok;
    notes.push_back(absl::StrCat(v.config, ": ", note, ok ? "" : " (FAIL)"));
  }
  if (!any) return;
  check.detail = absl::StrJoin(notes, "; ");
  out->push_back(std::move(check));
}

void AddChecks(Comparison* c) {
  const std::vector<ConfigView> views = ViewsByConfig(c->rows);
  std::vector<OrderingCheck>& out = c->checks;
  auto has_sara = [](const ConfigView& v) { return v.sara != nullptr; };

  CheckEach(
      views, absl::StrFormat("sara hit ratio >= %.2f", kMinSaraHitRatio),
      has_sara,
      [](const ConfigView& v, std::string* note) {
        *note = absl::StrFormat("%.4f", v.sara->hit_ratio);
        return v.sara->hit_ratio >= kMinSaraHitRatio;
      },
      &out);
  CheckEach(
      views,
      absl::StrFormat("sara mean elapsed >= %.2f x deadline",
                      kMinSaraElapsedShare),
      has_sara,
      [](const ConfigView& v, std::string* note) {
        const double share = v.sara->mean_elapsed.count() /
                             static_cast<double>(v.sara->info.deadline.count());
        *note = absl::StrFormat("%.4f", share);
        return share >= kMinSaraElapsedShare;
      },
      &out);
  CheckEach(
      views, "sara throughput > greedy",
      [](const ConfigView& v) { return v.sara && v.greedy; },
      [](const ConfigView& v, std::string* note) {
        *note = absl::StrFormat("%.4f vs %.4f", v.sara->nonrt_throughput,
                                v.greedy->nonrt_throughput);
        return v.sara->nonrt_throughput > v.greedy->nonrt_throughput;
      },
      &out);
  CheckEach(
      views, "sara throughput > tmo-low",
      [](const ConfigView& v) { return v.sara && v.tmo_low; },
      [](const ConfigView& v, std::string* note) {
        *note = absl::StrFormat("%.4f vs %.4f", v.sara->nonrt_throughput,
                                v.tmo_low->nonrt_throughput);
        return v.sara->nonrt_throughput > v.tmo_low->nonrt_throughput;
      },
      &out);
  CheckEach(
      views, "offline hit ratio < sara",
      [](const ConfigView& v) { return v.sara && v.offline; },
      [](const ConfigView& v, std::string* note) {
        *note = absl::StrFormat("%.4f vs %.4f", v.offline->hit_ratio,
                                v.sara->hit_ratio);
        return v.offline->hit_ratio < v.sara->hit_ratio;
      },
      &out);
  CheckEach(
      views, "tmo-high hit ratio < sara",
      [](const ConfigView& v) { return v.sara && v.tmo_high; },
      [](const ConfigView& v, std::string* note) {
        *note = absl::StrFormat("%.4f vs %.4f", v.tmo_high->hit_ratio,
                                v.sara->hit_ratio);
        return v.tmo_high->hit_ratio < v.sara->hit_ratio;
      },
      &out);
  CheckEach(
      views, "sara mean limit < greedy",
      [](const ConfigView& v) { return v.sara && v.greedy; },
      [](const ConfigView& v, std::string* note) {
        *note = absl::StrFormat("%.1f vs %.1f MB", v.sara->mean_limit_mb,
                                v.greedy->mean_limit_mb);
        return v.sara->mean_limit_mb < v.greedy->mean_limit_mb;
      },
      &out);
  CheckEach(
      views, "dropping improves hit ratio",
      [](const ConfigView& v) { return v.sara && v.sara_no_drop; },
      [](const ConfigView& v, std::string* note) {
        *note = absl::StrFormat("%.4f vs %.4f", v.sara->hit_ratio,
                                v.sara_no_drop->hit_ratio);
        return v.sara->hit_ratio > v.sara_no_drop->hit_ratio;
      },
      &out);

  // Peak of the SARA/Greedy ratio: the smallest memory fraction paired with
  // the fastest SSD among configs that have both allocators.
  const ComparisonRow* peak = nullptr;
  std::vector<const ComparisonRow*> ratios;
  for (const ConfigView& v : views) {
    if (v.sara == nullptr || !v.sara->ratio_vs_greedy.has_value()) continue;
    ratios.push_back(v.sara);
    const CellInfo& i = v.sara->info;
    if (peak == nullptr || i.memory_fraction < peak->info.memory_fraction ||
        (i.memory_fraction == peak->info.memory_fraction &&
         i.ssd_read_bw > peak->info.ssd_read_bw)) {
      peak = v.sara;
    }
  }
  if (ratios.size() >= 2) {
    OrderingCheck check{.name = "sara/greedy ratio peaks at small memory, "
                                "fast SSD",
                        .passed = true,
                        .detail = {}};
    std::vector<std::string> notes;
    for (const ComparisonRow* r : ratios) {
      notes.push_back(
          absl::StrFormat("%s: %.3f", r->info.config, *r->ratio_vs_greedy));
      if (r != peak && *r->ratio_vs_greedy > *peak->ratio_vs_greedy) {
        check.passed = false;
      }
    }
    check.detail = absl::StrCat("expected peak ", peak->info.config, "; ",
                                absl::StrJoin(notes, ", "));
    out.push_back(std::move(check));
  }
  if (peak != nullptr) {
    out.push_back(OrderingCheck{
        .name = absl::StrFormat("sara/greedy ratio >= %.1f at %s",
                                kMinPeakThroughputRatio, peak->info.config),
        .passed = *peak->ratio_vs_greedy >= kMinPeakThroughputRatio,
        .detail = absl::StrFormat("%.3f", *peak->ratio_vs_greedy)});
  }
}

std::string Optional(const std::optional<double>& v, int precision,
                     bool signed_value = false) {
  if (!v.has_value()) return std::string();
  return signed_value ? absl::StrFormat("%+.*f", precision, *v)
                      : absl::StrFormat("%.*f", precision, *v);
}

}  // namespace

bool Comparison::all_passed() const {
  if (!problems.empty()) return false;
  return std::all_of(checks.begin(), checks.end(),
                     [](const OrderingCheck& c) { return c.passed; });
}

Comparison Compare(std::span<const CellSummary> cells) {
  Comparison c;
  std::map<std::pair<std::string, std::string>, size_t> index;
  for (const CellSummary& cell : cells) {
    const auto key = std::make_pair(cell.info.config, cell.info.allocator);
    auto [it, inserted] = index.emplace(key, c.rows.size());
    if (inserted) {
      ComparisonRow row;
      row.info = cell.info;
      c.rows.push_back(row);
    }
    ComparisonRow& row = c.rows[it->second];
    row.repetitions += 1;
    row.hit_ratio += cell.row.deadline_hit_ratio;
    row.nonrt_throughput += cell.row.nonrt_throughput;
    row.mean_elapsed += cell.row.mean_elapsed;
    row.drop_count += cell.row.drop_count;
    row.mean_limit_mb += cell.row.mean_soft_rt_limit_mb;
  }
  for (ComparisonRow& row : c.rows) {
    const double n = static_cast<double>(row.repetitions);
    row.hit_ratio /= n;
    row.nonrt_throughput /= n;
    row.mean_elapsed /= n;
    row.mean_limit_mb /= n;
  }
  for (const ConfigView& v : ViewsByConfig(c.rows)) {
    for (ComparisonRow& row : c.rows) {
      if (row.info.config != v.config) continue;
      if (v.greedy && v.greedy->nonrt_throughput > 0.0) {
        row.ratio_vs_greedy = row.nonrt_throughput / v.greedy->nonrt_throughput;
      }
      if (v.tmo_low && v.tmo_low->nonrt_throughput > 0.0) {
        row.ratio_vs_tmo_low =
            row.nonrt_throughput / v.tmo_low->nonrt_throughput;
      }
      if (v.sara) row.hit_delta_vs_sara = row.hit_ratio - v.sara->hit_ratio;
    }
  }
  AddChecks(&c);
  return c;
}

std::vector<CellSummary> LoadCells(std::span<const std::filesystem::path> roots,
                                   std::vector<std::string>* problems) {
  std::vector<CellSummary> cells;
  for (const std::filesystem::path& root : roots) {
    const std::vector<std::filesystem::path> dirs = FindBundles(root);
    if (dirs.empty()) {
      problems->push_back(absl::StrCat(root.string(), ": no bundles found"));
    }
    for (const std::filesystem::path& dir : dirs) {
      absl::StatusOr<CellSummary> cell = LoadBundle(dir);
      if (cell.ok()) {
        cells.push_back(*std::move(cell));
      } else {
        problems->push_back(std::string(cell.status().message()));
      }
    }
  }
  return cells;
}

std::vector<std::string> MissingCells(const ExperimentPlan& plan,
                                      const std::filesystem::path& root) {
  std::vector<std::string> missing;
  for (const ExperimentConfig& config : plan.configs) {
    for (const AllocatorSpec& a : config.allocators) {
      for (int64_t r = 0; r < config.repetitions; ++r) {
        const std::filesystem::path dir =
            CellDirectory(root, config, a, RepetitionSeed(config, r));
        std::error_code ec;
        if (!std::filesystem::is_regular_file(dir / "summary.json", ec)) {
          missing.push_back(absl::StrCat("missing bundle ", dir.string()));
        }
      }
    }
  }
  return missing;
}

std::string RenderComparisonCsv(const Comparison& comparison) {
  std::string out = absl::StrCat(kComparisonHeader, "\n");
  for (const ComparisonRow& r : comparison.rows) {
    absl::StrAppendFormat(
        &out, "%s,%s,%d,%.6f,%.6f,%.1f,%d,%.3f,%s,%s,%s\n", r.info.config,
        r.info.allocator, r.repetitions, r.hit_ratio, r.nonrt_throughput,
        r.mean_elapsed.count(), r.drop_count, r.mean_limit_mb,
        Optional(r.ratio_vs_greedy, 4),
        Optional(r.ratio_vs_tmo_low, 4),
        Optional(r.hit_delta_vs_sara, 4, true));
  }
  return out;
}

std::string RenderComparisonJson(const Comparison& comparison) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const ComparisonRow& r : comparison.rows) {
    nlohmann::ordered_json row;
    row["config"] = r.info.config;
    row["allocator"] = r.info.allocator;
    row["repetitions"] = r.repetitions;
    row["deadline_hit_ratio"] = r.hit_ratio;
    row["nonrt_throughput"] = r.nonrt_throughput;
    row["mean_elapsed_us"] = r.mean_elapsed.count();
    row["drop_count"] = r.drop_count;
    row["mean_soft_rt_limit_mb"] = r.mean_limit_mb;
    auto put = [&](const char* key, const std::optional<double>& v) {
      row[key] = v.has_value() ? nlohmann::ordered_json(*v)
                               : nlohmann::ordered_json(nullptr);
    };
    put("ratio_vs_greedy", r.ratio_vs_greedy);
    put("ratio_vs_tmo_low", r.ratio_vs_tmo_low);
    put("hit_delta_vs_sara", r.hit_delta_vs_sara);
    rows.push_back(row);
  }
  j["rows"] = rows;
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const OrderingCheck& c : comparison.checks) {
    checks.push_back(
        {{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  j["checks"] = checks;
  j["problems"] = comparison.problems;
  return j.dump(2) + "\n";
}

std::string RenderMarkdownReport(const Comparison& comparison) {
  std::string out =
      "# Allocator comparison\n\n"
      "Throughput ratios are normalized to Greedy (and TMO-Low) within each "
      "config. Hit-ratio deltas are relative to SARA.\n\n"
      "| config | allocator | reps | hit ratio | throughput | vs greedy | "
      "vs tmo-low | hit delta | mean elapsed (s) | drops | mean limit (MB) "
      "|\n"
      "|---|---|---|---|---|---|---|---|---|---|---|\n";
  for (const ComparisonRow& r : comparison.rows) {
    absl::StrAppendFormat(
        &out, "| %s | %s | %d | %.4f | %.4f | %s | %s | %s | %.3f | %d | %.1f |\n",
        r.info.config, r.info.allocator, r.repetitions, r.hit_ratio,
        r.nonrt_throughput, Optional(r.ratio_vs_greedy, 3),
        Optional(r.ratio_vs_tmo_low, 3),
        Optional(r.hit_delta_vs_sara, 4, true),
        r.mean_elapsed.count() / 1e6, r.drop_count, r.mean_limit_mb);
  }
  out += "\n## Ordering checks\n\n";
  for (const OrderingCheck& c : comparison.checks) {
    absl::StrAppend(&out, "- ", c.passed ? "PASS" : "FAIL", " ", c.name,
                    ": ", c.detail, "\n");
  }
  if (!comparison.problems.empty()) {
    out += "\n## Problems\n\n";
    for (const std::string& p : comparison.problems) {
      absl::StrAppend(&out, "- ", p, "\n");
    }
  }
  return out;
}

}  // namespace stallsim::harness
