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


// stallsim: run, profile, sweep and compare simulated allocator experiments.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "stallsim/harness/bundle.h"
#include "stallsim/harness/compare.h"
#include "stallsim/harness/config.h"
#include "stallsim/harness/profile.h"
#include "stallsim/harness/runner.h"
#include "stallsim/harness/sweep.h"

namespace {

namespace fs = std::filesystem;
namespace h = stallsim::harness;

constexpr int kExitError = 1;
constexpr int kExitCheckFailed = 3;

struct CommonFlags {
  std::string config;
  std::string out;
  std::optional<uint64_t> seed;
  int jobs = 1;
  std::string format = "csv";
};

int Fail(const absl::Status& status) {
  std::cerr << "stallsim: " << status.message() << "\n";
  return kExitError;
}

absl::StatusOr<h::ExperimentPlan> LoadPlanFlag(const CommonFlags& flags) {
  absl::StatusOr<h::ExperimentPlan> plan =
      flags.config.empty() ? h::DefaultPlan() : h::LoadPlan(flags.config);
  if (!plan.ok()) return plan.status();
  for (h::ExperimentConfig& c : plan->configs) {
    if (flags.seed.has_value()) c.scenario.seed = *flags.seed;
    if (!flags.out.empty()) c.output_dir = flags.out;
  }
  return plan;
}

fs::path OutputRoot(const CommonFlags& flags, const h::ExperimentPlan& plan) {
  if (!flags.out.empty()) return flags.out;
  if (!plan.configs.empty()) return plan.configs.front().output_dir;
  return "results";
}

// Keeps allocators named in `names` (by label or kind); kinds not configured
// are added with default parameters.
absl::Status FilterAllocators(const std::vector<std::string>& names,
                              h::ExperimentPlan* plan) {
  if (names.empty()) return absl::OkStatus();
  for (h::ExperimentConfig& c : plan->configs) {
    std::vector<h::AllocatorSpec> kept;
    for (const std::string& name : names) {
      bool found = false;
      for (const h::AllocatorSpec& a : c.allocators) {
        if (a.label == name) {
          kept.push_back(a);
          found = true;
        }
      }
      if (found) continue;
      absl::StatusOr<h::AllocatorKind> kind = h::ParseAllocatorKind(name);
      if (!kind.ok()) return kind.status();
      h::AllocatorSpec spec;
      spec.kind = *kind;
      spec.label = name;
      kept.push_back(spec);
    }
    c.allocators = kept;
    if (absl::Status s = c.Validate(); !s.ok()) return s;
  }
  return absl::OkStatus();
}

absl::Status EnsureDir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    return absl::PermissionDeniedError(
        absl::StrCat("cannot create ", dir.string(), ": ", ec.message()));
  }
  return absl::OkStatus();
}

int RunCommand(const CommonFlags& flags,
               const std::vector<std::string>& allocators) {
  absl::StatusOr<h::ExperimentPlan> plan = LoadPlanFlag(flags);
  if (!plan.ok()) return Fail(plan.status());
  if (absl::Status s = FilterAllocators(allocators, &*plan); !s.ok()) {
    return Fail(s);
  }
  const fs::path root = OutputRoot(flags, *plan);
  h::RunSettings settings;
  settings.jobs = flags.jobs;
  absl::StatusOr<std::vector<h::CellSummary>> cells =
      h::RunExperiment(*plan, settings);
  if (!cells.ok()) return Fail(cells.status());
  if (absl::Status s = EnsureDir(root); !s.ok()) return Fail(s);
  const bool json = flags.format == "json";
  const std::string table = json ? h::RenderSummaryTableJson(*cells)
                                 : h::RenderSummaryTableCsv(*cells);
  if (absl::Status s = h::WriteTextFile(
          root / (json ? "summary.json" : "summary.csv"), table);
      !s.ok()) {
    return Fail(s);
  }
  std::cout << table;
  return 0;
}

int ProfileCommand(const CommonFlags& flags, double long_stall_probability,
                   int64_t periods) {
  absl::StatusOr<h::ExperimentPlan> plan = LoadPlanFlag(flags);
  if (!plan.ok()) return Fail(plan.status());
  const fs::path root = OutputRoot(flags, *plan);
  if (absl::Status s = EnsureDir(root); !s.ok()) return Fail(s);
  h::ProfileOptions options;
  options.periods = periods;
  for (const h::ExperimentConfig& config : plan->configs) {
    stallsim::ScenarioConfig scenario = config.scenario;
    if (scenario.long_stall.probability_per_period == 0.0) {
      scenario.long_stall.probability_per_period = long_stall_probability;
    }
    absl::StatusOr<h::TaskProfile> profile =
        h::ProfileTask(scenario, scenario.primary_task(), options);
    if (!profile.ok()) return Fail(profile.status());
    const bool json = flags.format == "json";
    const std::string text =
        json ? h::RenderProfileJson(*profile) : h::RenderSeparationCsv(*profile);
    const fs::path file =
        root / absl::StrCat(json ? "profile-" : "separation-", config.label,
                            json ? ".json" : ".csv");
    if (absl::Status s = h::WriteTextFile(file, text); !s.ok()) return Fail(s);
    std::cout << absl::StrFormat(
        "%s %s: bcet=%dus slope=%.4f intercept=%.4fs r2=%.4f -> %s\n",
        config.label, profile->task, profile->t_bcet_measured.count(),
        profile->fit.slope, profile->fit.intercept_s, profile->fit.r_squared,
        file.string());
  }
  return 0;
}

int SweepCommand(const CommonFlags& flags, std::vector<double> grid) {
  absl::StatusOr<h::ExperimentPlan> plan = LoadPlanFlag(flags);
  if (!plan.ok()) return Fail(plan.status());
  if (grid.empty()) grid = plan->sweep_grid;
  const fs::path root = OutputRoot(flags, *plan);
  if (absl::Status s = EnsureDir(root); !s.ok()) return Fail(s);
  for (const h::ExperimentConfig& config : plan->configs) {
    absl::StatusOr<std::vector<h::SweepRow>> rows = h::SweepThreshold(
        config.scenario, config.scenario.primary_task(), grid,
        h::SweepOptions{.repetitions = config.repetitions,
                        .step_mb = 1,
                        .jobs = flags.jobs});
    if (!rows.ok()) return Fail(rows.status());
    std::string text;
    if (flags.format == "json") {
      text = "[\n";
      for (size_t i = 0; i < rows->size(); ++i) {
        const h::SweepRow& r = (*rows)[i];
        absl::StrAppendFormat(
            &text,
            "  {\"threshold_pct\": %g, \"hit_ratio\": %.6f, "
            "\"nonrt_throughput\": %.6f, \"mean_elapsed_us\": %.1f}%s\n",
            r.threshold_pct, r.hit_ratio, r.nonrt_throughput,
            r.mean_elapsed.count(), i + 1 < rows->size() ? "," : "");
      }
      text += "]\n";
    } else {
      text = h::RenderSweepCsv(*rows);
    }
    const fs::path file =
        root / absl::StrCat("sweep-", config.label,
                            flags.format == "json" ? ".json" : ".csv");
    if (absl::Status s = h::WriteTextFile(file, text); !s.ok()) return Fail(s);
    std::cout << "# " << config.label << "\n" << text;
  }
  return 0;
}

int CompareCommand(const CommonFlags& flags, std::vector<std::string> dirs,
                   bool check) {
  std::optional<h::ExperimentPlan> plan;
  if (!flags.config.empty()) {
    absl::StatusOr<h::ExperimentPlan> loaded = LoadPlanFlag(flags);
    if (!loaded.ok()) return Fail(loaded.status());
    plan = *std::move(loaded);
  }
  if (dirs.empty()) {
    dirs.push_back(plan.has_value() ? OutputRoot(flags, *plan).string()
                   : flags.out.empty() ? std::string("results")
                                       : flags.out);
  }
  std::vector<fs::path> roots(dirs.begin(), dirs.end());
  std::vector<std::string> problems;
  std::vector<h::CellSummary> cells = h::LoadCells(roots, &problems);
  if (plan.has_value()) {
    for (std::string& m : h::MissingCells(*plan, roots.front())) {
      problems.push_back(std::move(m));
    }
  }
  h::Comparison comparison = h::Compare(cells);
  comparison.problems = std::move(problems);

  const fs::path out = flags.out.empty() ? roots.front() : fs::path(flags.out);
  if (absl::Status s = EnsureDir(out); !s.ok()) return Fail(s);
  const bool json = flags.format == "json";
  const std::string table = json ? h::RenderComparisonJson(comparison)
                                 : h::RenderComparisonCsv(comparison);
  const std::string report = h::RenderMarkdownReport(comparison);
  if (absl::Status s = h::WriteTextFile(
          out / (json ? "comparison.json" : "comparison.csv"), table);
      !s.ok()) {
    return Fail(s);
  }
  if (absl::Status s = h::WriteTextFile(out / "report.md", report); !s.ok()) {
    return Fail(s);
  }
  std::cout << report;
  if (check && !comparison.all_passed()) {
    std::cerr << "stallsim: ordering checks failed\n";
    return kExitCheckFailed;
  }
  return 0;
}

void AddCommonFlags(CLI::App* cmd, CommonFlags* flags, bool with_jobs) {
  cmd->add_option("--config", flags->config,
                  "Experiment file (JSON); built-in matrix when omitted");
  cmd->add_option("--out", flags->out, "Output directory");
  cmd->add_option("--seed", flags->seed, "Base seed override");
  cmd->add_option("--format", flags->format, "Result format")
      ->check(CLI::IsMember({"csv", "json"}));
  if (with_jobs) {
    cmd->add_option("--jobs", flags->jobs, "Parallel cells")
        ->check(CLI::PositiveNumber);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulated stall-aware memory allocation experiments"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::vector<std::string> allocators;
  double long_stall_probability = 0.02;
  int64_t periods = 300;
  std::vector<double> grid;
  std::vector<std::string> dirs;
  bool check = false;

  CLI::App* run = app.add_subcommand("run", "Run the experiment matrix");
  AddCommonFlags(run, &flags, true);
  run->add_option("--allocators", allocators,
                  "Allocators to run (labels or kinds)")
      ->delimiter(',');

  CLI::App* profile = app.add_subcommand(
      "profile", "Measure BCET, stall linearity and long-stall separation");
  AddCommonFlags(profile, &flags, false);
  profile
      ->add_option("--long-stall-probability", long_stall_probability,
                   "Injection rate used when the config has none")
      ->check(CLI::Range(0.0, 1.0));
  profile->add_option("--periods", periods, "Profiling horizon")
      ->check(CLI::Range(int64_t{2}, int64_t{1'000'000}));

  CLI::App* sweep =
      app.add_subcommand("sweep", "Static PSI threshold sweep per config");
  AddCommonFlags(sweep, &flags, true);
  sweep->add_option("--grid", grid, "Thresholds in percent")->delimiter(',');

  CLI::App* compare =
      app.add_subcommand("compare", "Aggregate bundles and check orderings");
  AddCommonFlags(compare, &flags, false);
  compare->add_option("bundles", dirs, "Result directories");
  compare->add_flag("--check", check, "Exit nonzero if any check fails");

  CLI11_PARSE(app, argc, argv);

  if (*run) return RunCommand(flags, allocators);
  if (*profile) return ProfileCommand(flags, long_stall_probability, periods);
  if (*sweep) return SweepCommand(flags, grid);
  if (*compare) return CompareCommand(flags, dirs, check);
  return kExitError;
}
