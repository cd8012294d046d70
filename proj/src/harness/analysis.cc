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


#include "stallsim/harness/analysis.h"

#include <algorithm>
#include <set>
#include <span>

#include "stallsim/sara.h"

namespace stallsim::harness {
namespace {

enum class PeriodClass { kInjected, kNormal, kOther };

// A period is injected when an event is already active as its job starts,
// so the job is stalled from its first interval. Periods hit part way
// through are excluded from both classes.
PeriodClass Classify(const PeriodRecord& p, const TraceLog& trace) {
  if (!p.long_stall) return PeriodClass::kNormal;
  for (const auto& [start, end] : trace.long_stall_events) {
    if (start <= p.start && p.start < end) return PeriodClass::kInjected;
  }
  return PeriodClass::kOther;
}

std::span<const Micros> DeadlineWindow(const PeriodRecord& p,
                                       const TaskSpec& spec, Micros l_intv) {
  const std::span<const Micros> all(p.interval_stalls);
  const int64_t room = (spec.deadline - p.t_wait) / l_intv;
  if (room <= 0) return all;
  return all.first(std::min(all.size(), static_cast<size_t>(room)));
}

int64_t SevereCount(std::span<const Micros> stalls, Micros l_intv,
                    double n_percent) {
  return std::count_if(stalls.begin(), stalls.end(), [&](Micros s) {
    return sara::IsSevere(s, l_intv, n_percent);
  });
}

}  // namespace

double DetectionCounts::injected_rate() const {
  return injected == 0 ? 0.0
                       : static_cast<double>(injected_flagged) /
                             static_cast<double>(injected);
}

double DetectionCounts::normal_rate() const {
  return normal == 0 ? 0.0
                     : static_cast<double>(normal_flagged) /
                           static_cast<double>(normal);
}

DetectionCounts EvaluateDetection(const TraceLog& trace,
                                  const ScenarioConfig& config, size_t task,
                                  double m_percent, double n_percent) {
  const TaskSpec& spec = config.tasks[task];
  DetectionCounts counts;
  for (const PeriodRecord& p : trace.periods[task]) {
    const PeriodClass c = Classify(p, trace);
    if (c == PeriodClass::kOther) continue;
    const std::span<const Micros> window =
        DeadlineWindow(p, spec, config.l_intv);
    const bool flagged = sara::IsLongStall(
        SevereCount(window, config.l_intv, n_percent),
        static_cast<int64_t>(window.size()), m_percent);
    if (c == PeriodClass::kInjected) {
      ++counts.injected;
      counts.injected_flagged += flagged ? 1 : 0;
    } else {
      ++counts.normal;
      counts.normal_flagged += flagged ? 1 : 0;
    }
  }
  return counts;
}

SeverityHistogram SevereHistogram(const TraceLog& trace,
                                  const ScenarioConfig& config, size_t task,
                                  double n_percent) {
  const TaskSpec& spec = config.tasks[task];
  SeverityHistogram hist;
  for (const PeriodRecord& p : trace.periods[task]) {
    const PeriodClass c = Classify(p, trace);
    if (c == PeriodClass::kOther) continue;
    const std::span<const Micros> window =
        DeadlineWindow(p, spec, config.l_intv);
    if (window.empty()) continue;
    const int64_t severe = SevereCount(window, config.l_intv, n_percent);
    const int64_t bucket =
        severe * 10 / static_cast<int64_t>(window.size());
    (c == PeriodClass::kInjected ? hist.injected : hist.normal)[bucket] += 1;
  }
  return hist;
}

double CascadeStats::mean() const {
  return events == 0 ? 0.0
                     : static_cast<double>(post_stall_misses) /
                           static_cast<double>(events);
}

CascadeStats MeasureCascades(const TraceLog& trace, size_t task) {
  const std::vector<PeriodRecord>& periods = trace.periods[task];
  // Each event is charged to the job executing at its onset, or the next
  // job to start if the task was idle.
  std::set<size_t> hit;
  for (const auto& [start, end] : trace.long_stall_events) {
    const auto it = std::find_if(
        periods.begin(), periods.end(), [&](const PeriodRecord& p) {
          return p.start + p.t_exec > start;
        });
    if (it != periods.end()) {
      hit.insert(static_cast<size_t>(it - periods.begin()));
    }
  }
  CascadeStats stats;
  for (size_t i : hit) {
    ++stats.events;
    int64_t run = 0;
    for (size_t k = i + 1; k < periods.size() && !periods[k].deadline_met;
         ++k) {
      ++run;
    }
    stats.post_stall_misses += run;
    stats.longest = std::max(stats.longest, run);
  }
  return stats;
}

}  // namespace stallsim::harness
