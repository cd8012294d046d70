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

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "src/harness/absl_view.h"
#include "src/harness/json_fields.h"

namespace stallsim::harness {
namespace internal {
extern const char kPresetsJson[];
}  // namespace internal

namespace {

using json_fields::Child;
using json_fields::Index;
using json_fields::Invalid;
using json_fields::Json;
using json_fields::ReadOptional;

struct Presets {
  std::map<std::string, TaskSpec, std::less<>> tasks;
  std::map<std::string, SsdProfile, std::less<>> ssds;
  ScenarioConfig scenario;
};

absl::Status ParseTaskFields(const Json& j, const std::string& path,
                             TaskSpec* task) {
  if (absl::Status s = json_fields::ExpectObject(j, path); !s.ok()) return s;
  if (absl::Status s = json_fields::CheckKeys(
          j, path,
          {"preset", "name", "kind", "period_us", "deadline_us", "t_bcet_us",
           "working_set_mb", "demand_jitter", "touch_rate", "dirty_fraction",
           "work_unit_us"});
      !s.ok()) {
    return s;
  }
  if (auto it = j.find("kind"); it != j.end()) {
    std::string kind;
    if (absl::Status s = json_fields::Read(*it, Child(path, "kind"), &kind);
        !s.ok()) {
      return s;
    }
    if (kind == "soft_rt") {
      task->kind = TaskKind::kSoftRt;
    } else if (kind == "non_rt") {
      task->kind = TaskKind::kNonRt;
    } else {
      return Invalid(Child(path, "kind"), "expected \"soft_rt\" or \"non_rt\"");
    }
  }
  absl::Status s = ReadOptional(j, path, "name", &task->name);
  if (s.ok()) s = ReadOptional(j, path, "period_us", &task->period);
  if (s.ok()) s = ReadOptional(j, path, "deadline_us", &task->deadline);
  if (s.ok()) s = ReadOptional(j, path, "t_bcet_us", &task->t_bcet);
  if (s.ok()) s = ReadOptional(j, path, "demand_jitter", &task->demand_jitter);
  if (s.ok()) s = ReadOptional(j, path, "touch_rate", &task->touch_rate);
  if (s.ok()) {
    s = ReadOptional(j, path, "dirty_fraction", &task->dirty_fraction);
  }
  if (s.ok()) s = ReadOptional(j, path, "work_unit_us", &task->work_unit);
  if (!s.ok()) return s;
  if (auto it = j.find("working_set_mb"); it != j.end()) {
    const std::string ws_path = Child(path, "working_set_mb");
    if (s = json_fields::ExpectObject(*it, ws_path); !s.ok()) return s;
    if (s = json_fields::CheckKeys(*it, ws_path, {"min", "avg", "max"});
        !s.ok()) {
      return s;
    }
    s = ReadOptional(*it, ws_path, "min", &task->working_set.min_mb);
    if (s.ok()) s = ReadOptional(*it, ws_path, "avg", &task->working_set.avg_mb);
    if (s.ok()) s = ReadOptional(*it, ws_path, "max", &task->working_set.max_mb);
  }
  return s;
}

absl::Status ParseSsdFields(const Json& j, const std::string& path,
                            SsdProfile* ssd) {
  if (absl::Status s = json_fields::ExpectObject(j, path); !s.ok()) return s;
  if (absl::Status s = json_fields::CheckKeys(
          j, path,
          {"preset", "name", "read_bw", "write_bw", "per_op_latency_us",
           "page_size"});
      !s.ok()) {
    return s;
  }
  absl::Status s = ReadOptional(j, path, "name", &ssd->name);
  if (s.ok()) s = ReadOptional(j, path, "read_bw", &ssd->read_bw);
  if (s.ok()) s = ReadOptional(j, path, "write_bw", &ssd->write_bw);
  if (s.ok()) {
    s = ReadOptional(j, path, "per_op_latency_us", &ssd->per_op_latency);
  }
  if (s.ok()) s = ReadOptional(j, path, "page_size", &ssd->page_size);
  return s;
}

absl::Status ParseScenarioFields(const Json& j, const std::string& path,
                                 ScenarioConfig* scenario) {
  if (absl::Status s = json_fields::ExpectObject(j, path); !s.ok()) return s;
  if (absl::Status s = json_fields::CheckKeys(
          j, path,
          {"l_intv_us", "base_unit_x_mb", "horizon_periods", "t_drop_us",
           "seed", "stall_attribution", "long_stall"});
      !s.ok()) {
    return s;
  }
  absl::Status s = ReadOptional(j, path, "l_intv_us", &scenario->l_intv);
  if (s.ok()) {
    s = ReadOptional(j, path, "base_unit_x_mb", &scenario->base_unit_x_mb);
  }
  if (s.ok()) {
    s = ReadOptional(j, path, "horizon_periods", &scenario->horizon_periods);
  }
  if (s.ok()) s = ReadOptional(j, path, "t_drop_us", &scenario->t_drop);
  if (s.ok()) s = ReadOptional(j, path, "seed", &scenario->seed);
  if (!s.ok()) return s;
  if (auto it = j.find("stall_attribution"); it != j.end()) {
    const std::string p = Child(path, "stall_attribution");
    if (s = json_fields::ExpectObject(*it, p); !s.ok()) return s;
    if (s = json_fields::CheckKeys(*it, p, {"mem_fraction", "io_fraction"});
        !s.ok()) {
      return s;
    }
    StallAttribution& a = scenario->stall_attribution;
    s = ReadOptional(*it, p, "mem_fraction", &a.mem_fraction);
    if (s.ok()) s = ReadOptional(*it, p, "io_fraction", &a.io_fraction);
    if (!s.ok()) return s;
  }
  if (auto it = j.find("long_stall"); it != j.end()) {
    const std::string p = Child(path, "long_stall");
    if (s = json_fields::ExpectObject(*it, p); !s.ok()) return s;
    if (s = json_fields::CheckKeys(*it, p,
                                   {"probability_per_period", "min_duration_us",
                                    "max_duration_us"});
        !s.ok()) {
      return s;
    }
    LongStallConfig& ls = scenario->long_stall;
    s = ReadOptional(*it, p, "probability_per_period",
                     &ls.probability_per_period);
    if (s.ok()) s = ReadOptional(*it, p, "min_duration_us", &ls.min_duration);
    if (s.ok()) s = ReadOptional(*it, p, "max_duration_us", &ls.max_duration);
  }
  return s;
}

absl::StatusOr<Presets> ParsePresets() {
  const Json j = Json::parse(internal::kPresetsJson, nullptr,
                             /*allow_exceptions=*/false);
  if (j.is_discarded()) return absl::InternalError("presets: malformed JSON");
  Presets presets;
  for (const auto& [name, value] : j.at("workloads").items()) {
    TaskSpec task;
    task.name = name;
    if (absl::Status s =
            ParseTaskFields(value, Child("presets.workloads", name), &task);
        !s.ok()) {
      return s;
    }
    presets.tasks.emplace(name, task);
  }
  for (const auto& [name, value] : j.at("ssds").items()) {
    SsdProfile ssd;
    ssd.name = name;
    if (absl::Status s = ParseSsdFields(value, Child("presets.ssds", name), &ssd);
        !s.ok()) {
      return s;
    }
    presets.ssds.emplace(name, ssd);
  }
  if (absl::Status s = ParseScenarioFields(j.at("scenario"), "presets.scenario",
                                           &presets.scenario);
      !s.ok()) {
    return s;
  }
  return presets;
}

const absl::StatusOr<Presets>& CachedPresets() {
  static const absl::StatusOr<Presets>* presets =
      new absl::StatusOr<Presets>(ParsePresets());
  return *presets;
}

absl::StatusOr<TaskSpec> ParseTask(const Json& j, const std::string& path) {
  if (j.is_string()) {
    absl::StatusOr<TaskSpec> preset = PresetTask(j.get<std::string>());
    if (!preset.ok()) return Invalid(path, preset.status().message());
    return preset;
  }
  if (absl::Status s = json_fields::ExpectObject(j, path); !s.ok()) return s;
  TaskSpec task;
  if (auto it = j.find("preset"); it != j.end()) {
    std::string name;
    if (absl::Status s = json_fields::Read(*it, Child(path, "preset"), &name);
        !s.ok()) {
      return s;
    }
    absl::StatusOr<TaskSpec> preset = PresetTask(name);
    if (!preset.ok()) {
      return Invalid(Child(path, "preset"), preset.status().message());
    }
    task = *preset;
  }
  if (absl::Status s = ParseTaskFields(j, path, &task); !s.ok()) return s;
  if (task.name.empty()) return Invalid(Child(path, "name"), "missing");
  if (absl::Status s = task.Validate(); !s.ok()) {
    return Invalid(path, s.message());
  }
  return task;
}

absl::StatusOr<SsdProfile> ParseSsd(const Json& j, const std::string& path) {
  if (j.is_string()) {
    absl::StatusOr<SsdProfile> preset = PresetSsd(j.get<std::string>());
    if (!preset.ok()) return Invalid(path, preset.status().message());
    return preset;
  }
  if (absl::Status s = json_fields::ExpectObject(j, path); !s.ok()) return s;
  SsdProfile ssd;
  if (auto it = j.find("preset"); it != j.end()) {
    std::string name;
    if (absl::Status s = json_fields::Read(*it, Child(path, "preset"), &name);
        !s.ok()) {
      return s;
    }
    absl::StatusOr<SsdProfile> preset = PresetSsd(name);
    if (!preset.ok()) {
      return Invalid(Child(path, "preset"), preset.status().message());
    }
    ssd = *preset;
  }
  if (absl::Status s = ParseSsdFields(j, path, &ssd); !s.ok()) return s;
  if (ssd.name.empty()) return Invalid(Child(path, "name"), "missing");
  if (absl::Status s = ssd.Validate(); !s.ok()) {
    return Invalid(path, s.message());
  }
  return ssd;
}

absl::StatusOr<AllocatorSpec> ParseAllocator(const Json& j,
                                             const std::string& path) {
  AllocatorSpec spec;
  std::string kind_name;
  if (j.is_string()) {
    kind_name = j.get<std::string>();
  } else {
    if (absl::Status s = json_fields::ExpectObject(j, path); !s.ok()) return s;
    auto it = j.find("kind");
    if (it == j.end()) return Invalid(Child(path, "kind"), "missing");
    if (absl::Status s = json_fields::Read(*it, Child(path, "kind"), &kind_name);
        !s.ok()) {
      return s;
    }
  }
  absl::StatusOr<AllocatorKind> kind = ParseAllocatorKind(kind_name);
  if (!kind.ok()) {
    return Invalid(j.is_string() ? path : Child(path, "kind"),
                   kind.status().message());
  }
  spec.kind = *kind;
  spec.label = std::string(AllocatorKindName(*kind));
  if (j.is_string()) return spec;

  absl::Status s;
  switch (spec.kind) {
    case AllocatorKind::kSara:
      s = json_fields::CheckKeys(j, path,
                                 {"kind", "label", "drop_enabled",
                                  "base_unit_x_mb", "long_stall_m",
                                  "long_stall_n"});
      break;
    case AllocatorKind::kTmoLow:
    case AllocatorKind::kTmoHigh:
      s = json_fields::CheckKeys(
          j, path, {"kind", "label", "psi_threshold", "window_us", "step_mb"});
      break;
    case AllocatorKind::kGreedy:
    case AllocatorKind::kOffline:
      s = json_fields::CheckKeys(j, path, {"kind", "label"});
      break;
  }
  if (s.ok()) s = ReadOptional(j, path, "label", &spec.label);
  if (s.ok()) s = ReadOptional(j, path, "drop_enabled", &spec.drop_enabled);
  if (s.ok() && j.contains("base_unit_x_mb")) {
    double x = 0.0;
    s = ReadOptional(j, path, "base_unit_x_mb", &x);
    spec.base_unit_x_mb = x;
  }
  if (s.ok()) s = ReadOptional(j, path, "long_stall_m", &spec.long_stall_m);
  if (s.ok()) s = ReadOptional(j, path, "long_stall_n", &spec.long_stall_n);
  if (s.ok()) {
    s = ReadOptional(j, path, "psi_threshold", &spec.tmo.psi_threshold);
  }
  if (s.ok()) s = ReadOptional(j, path, "window_us", &spec.tmo.window);
  if (s.ok()) s = ReadOptional(j, path, "step_mb", &spec.tmo.step_mb);
  if (!s.ok()) return s;
  if (spec.label.empty()) return Invalid(Child(path, "label"), "empty");
  if (s = spec.tmo.Validate(); !s.ok()) return Invalid(path, s.message());
  return spec;
}

// Accepts a scalar or a list of scalars.
template <typename T, typename Parse>
absl::Status ParseList(const Json& j, const std::string& path, Parse parse,
                       std::vector<T>* out) {
  out->clear();
  if (!j.is_array()) {
    absl::StatusOr<T> v = parse(j, path);
    if (!v.ok()) return v.status();
    out->push_back(*std::move(v));
    return absl::OkStatus();
  }
  if (j.empty()) return Invalid(path, "expected a non-empty list");
  for (size_t i = 0; i < j.size(); ++i) {
    absl::StatusOr<T> v = parse(j[i], Index(path, i));
    if (!v.ok()) return v.status();
    out->push_back(*std::move(v));
  }
  return absl::OkStatus();
}

absl::StatusOr<double> ParseNumber(const Json& j, const std::string& path) {
  double v = 0.0;
  if (absl::Status s = json_fields::Read(j, path, &v); !s.ok()) return s;
  return v;
}

std::string ConfigLabel(double fraction, absl::string_view ssd) {
  return absl::StrCat("mem", std::llround(fraction * 100.0), "-", ssd);
}

}  // namespace

std::string_view AllocatorKindName(AllocatorKind kind) {
  switch (kind) {
    case AllocatorKind::kSara:
      return "sara";
    case AllocatorKind::kGreedy:
      return "greedy";
    case AllocatorKind::kOffline:
      return "offline";
    case AllocatorKind::kTmoLow:
      return "tmo-low";
    case AllocatorKind::kTmoHigh:
      return "tmo-high";
  }
  return "unknown";
}

absl::StatusOr<AllocatorKind> ParseAllocatorKind(std::string_view name) {
  for (AllocatorKind k :
       {AllocatorKind::kSara, AllocatorKind::kGreedy, AllocatorKind::kOffline,
        AllocatorKind::kTmoLow, AllocatorKind::kTmoHigh}) {
    if (AllocatorKindName(k) == name) return k;
  }
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown allocator \"", AbslView(name),
      "\" (expected sara, greedy, offline, tmo-low, or tmo-high)"));
}

absl::Status ExperimentConfig::Validate() const {
  auto fail = [&](absl::string_view what) {
    return absl::InvalidArgumentError(absl::StrCat(label, ": ", what));
  };
  if (!(memory_fraction > 0.0 && memory_fraction <= 1.0)) {
    return fail("memory_fraction must be in (0, 1]");
  }
  if (repetitions < 1) return fail("repetitions must be at least 1");
  if (allocators.empty()) return fail("no allocators");
  std::set<std::string> labels;
  for (const AllocatorSpec& a : allocators) {
    if (!labels.insert(a.label).second) {
      return fail(absl::StrCat("duplicate allocator label \"", a.label, "\""));
    }
  }
  if (absl::Status s = scenario.Validate(); !s.ok()) return fail(s.message());
  return absl::OkStatus();
}

std::string_view PresetsJson() { return internal::kPresetsJson; }

absl::StatusOr<TaskSpec> PresetTask(std::string_view name) {
  const absl::StatusOr<Presets>& presets = CachedPresets();
  if (!presets.ok()) return presets.status();
  auto it = presets->tasks.find(name);
  if (it == presets->tasks.end()) {
    return absl::NotFoundError(absl::StrCat("unknown workload preset \"", AbslView(name),
                                            "\""));
  }
  return it->second;
}

absl::StatusOr<SsdProfile> PresetSsd(std::string_view name) {
  const absl::StatusOr<Presets>& presets = CachedPresets();
  if (!presets.ok()) return presets.status();
  auto it = presets->ssds.find(name);
  if (it == presets->ssds.end()) {
    return absl::NotFoundError(absl::StrCat("unknown SSD preset \"", AbslView(name),
                                            "\""));
  }
  return it->second;
}

absl::StatusOr<ScenarioConfig> PresetScenario() {
  const absl::StatusOr<Presets>& presets = CachedPresets();
  if (!presets.ok()) return presets.status();
  return presets->scenario;
}

int64_t TotalMemoryMb(const std::vector<TaskSpec>& tasks, double fraction) {
  int64_t peak = 0;
  for (const TaskSpec& t : tasks) peak += t.working_set.max_mb;
  return std::llround(fraction * static_cast<double>(peak));
}

absl::StatusOr<ExperimentPlan> ParsePlan(std::string_view json_text) {
  const Json j = Json::parse(json_text.begin(), json_text.end(), nullptr,
                             /*allow_exceptions=*/false);
  if (j.is_discarded()) return Invalid("", "malformed JSON");
  if (absl::Status s = json_fields::ExpectObject(j, ""); !s.ok()) return s;
  if (absl::Status s = json_fields::CheckKeys(
          j, "",
          {"name", "tasks", "memory_fraction", "ssd", "allocators",
           "repetitions", "scenario", "output_dir", "interval_trace",
           "sweep_grid"});
      !s.ok()) {
    return s;
  }

  ExperimentPlan plan;
  plan.name = "experiment";
  if (absl::Status s = ReadOptional(j, "", "name", &plan.name); !s.ok()) {
    return s;
  }

  absl::StatusOr<ScenarioConfig> base = PresetScenario();
  if (!base.ok()) return base.status();
  if (auto it = j.find("scenario"); it != j.end()) {
    if (absl::Status s = ParseScenarioFields(*it, "scenario", &*base); !s.ok()) {
      return s;
    }
  }

  std::vector<TaskSpec> tasks;
  if (auto it = j.find("tasks"); it != j.end()) {
    if (!it->is_array() || it->empty()) {
      return Invalid("tasks", "expected a non-empty list");
    }
    if (absl::Status s = ParseList<TaskSpec>(*it, "tasks", ParseTask, &tasks);
        !s.ok()) {
      return s;
    }
  } else {
    for (std::string_view name : {"sphinx", "graphchi"}) {
      absl::StatusOr<TaskSpec> t = PresetTask(name);
      if (!t.ok()) return t.status();
      tasks.push_back(*t);
    }
  }
  base->tasks = tasks;

  std::vector<double> fractions = {0.6, 0.8};
  if (auto it = j.find("memory_fraction"); it != j.end()) {
    if (absl::Status s = ParseList<double>(*it, "memory_fraction", ParseNumber,
                                           &fractions);
        !s.ok()) {
      return s;
    }
  }
  for (size_t i = 0; i < fractions.size(); ++i) {
    if (!(fractions[i] > 0.0 && fractions[i] <= 1.0)) {
      return Invalid(j.contains("memory_fraction") &&
                             j["memory_fraction"].is_array()
                         ? Index("memory_fraction", i)
                         : "memory_fraction",
                     "must be in (0, 1]");
    }
  }

  std::vector<SsdProfile> ssds;
  if (auto it = j.find("ssd"); it != j.end()) {
    if (absl::Status s = ParseList<SsdProfile>(*it, "ssd", ParseSsd, &ssds);
        !s.ok()) {
      return s;
    }
  } else {
    for (std::string_view name : {"slow", "fast"}) {
      absl::StatusOr<SsdProfile> ssd = PresetSsd(name);
      if (!ssd.ok()) return ssd.status();
      ssds.push_back(*ssd);
    }
  }

  std::vector<AllocatorSpec> allocators;
  if (auto it = j.find("allocators"); it != j.end()) {
    if (!it->is_array() || it->empty()) {
      return Invalid("allocators", "expected a non-empty list");
    }
    if (absl::Status s = ParseList<AllocatorSpec>(*it, "allocators",
                                                  ParseAllocator, &allocators);
        !s.ok()) {
      return s;
    }
  } else {
    for (AllocatorKind k :
         {AllocatorKind::kSara, AllocatorKind::kGreedy,
          AllocatorKind::kOffline, AllocatorKind::kTmoLow,
          AllocatorKind::kTmoHigh}) {
      AllocatorSpec spec;
      spec.kind = k;
      spec.label = std::string(AllocatorKindName(k));
      allocators.push_back(spec);
    }
  }

  for (size_t i = 1; i < allocators.size(); ++i) {
    for (size_t k = 0; k < i; ++k) {
      if (allocators[i].label == allocators[k].label) {
        return Invalid(Index("allocators", i),
                       absl::StrCat("duplicate label \"", allocators[i].label,
                                    "\""));
      }
    }
  }

  ExperimentConfig proto;
  proto.allocators = allocators;
  if (absl::Status s =
          ReadOptional(j, "", "repetitions", &proto.repetitions);
      !s.ok()) {
    return s;
  }
  if (proto.repetitions < 1) return Invalid("repetitions", "must be at least 1");
  std::string output_dir = proto.output_dir.string();
  if (absl::Status s = ReadOptional(j, "", "output_dir", &output_dir);
      !s.ok()) {
    return s;
  }
  proto.output_dir = output_dir;
  if (auto it = j.find("interval_trace"); it != j.end()) {
    std::string mode;
    if (absl::Status s = json_fields::Read(*it, "interval_trace", &mode);
        !s.ok()) {
      return s;
    }
    if (mode == "none") {
      proto.interval_trace = IntervalTrace::kNone;
    } else if (mode == "first") {
      proto.interval_trace = IntervalTrace::kFirst;
    } else if (mode == "all") {
      proto.interval_trace = IntervalTrace::kAll;
    } else {
      return Invalid("interval_trace", "expected \"none\", \"first\", or \"all\"");
    }
  }

  plan.sweep_grid = DefaultSweepGrid();
  if (auto it = j.find("sweep_grid"); it != j.end()) {
    if (!it->is_array()) return Invalid("sweep_grid", "expected a list");
    if (absl::Status s = ParseList<double>(*it, "sweep_grid", ParseNumber,
                                           &plan.sweep_grid);
        !s.ok()) {
      return s;
    }
    for (size_t i = 0; i < plan.sweep_grid.size(); ++i) {
      if (!(plan.sweep_grid[i] > 0.0 && plan.sweep_grid[i] <= 100.0)) {
        return Invalid(Index("sweep_grid", i), "must be in (0, 100]");
      }
    }
  }

  for (double fraction : fractions) {
    for (const SsdProfile& ssd : ssds) {
      ExperimentConfig config = proto;
      config.memory_fraction = fraction;
      config.label = ConfigLabel(fraction, ssd.name);
      config.scenario = *base;
      config.scenario.ssd = ssd;
      config.scenario.total_memory_mb = TotalMemoryMb(tasks, fraction);
      if (absl::Status s = config.Validate(); !s.ok()) return s;
      plan.configs.push_back(std::move(config));
    }
  }
  return plan;
}

absl::StatusOr<ExperimentPlan> LoadPlan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    return absl::NotFoundError(
        absl::StrCat("cannot open config ", path.string()));
  }
  std::ostringstream text;
  text << in.rdbuf();
  absl::StatusOr<ExperimentPlan> plan = ParsePlan(text.str());
  if (!plan.ok()) {
    return absl::Status(plan.status().code(),
                        absl::StrCat(path.string(), ": ",
                                     plan.status().message()));
  }
  return plan;
}

absl::StatusOr<ExperimentPlan> DefaultPlan() { return ParsePlan("{}"); }

std::vector<double> DefaultSweepGrid() {
  std::vector<double> grid;
  for (int p = 10; p <= 90; p += 10) grid.push_back(p);
  return grid;
}

}  // namespace stallsim::harness
