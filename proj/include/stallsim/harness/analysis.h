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


#ifndef STALLSIM_HARNESS_ANALYSIS_H_
#define STALLSIM_HARNESS_ANALYSIS_H_

#include <array>
#include <cstdint>
#include <vector>

#include "stallsim/scenario.h"
#include "stallsim/simulator.h"

namespace stallsim::harness {

// A period is "injected" when a long-stall event began at its release and
// "normal" when its job never overlapped an event. Other periods are not
// judged. Each judged job is classified from its interval stalls inside the
// deadline window (or all of them when the job started past its deadline).
struct DetectionCounts {
  int64_t injected = 0;
  int64_t injected_flagged = 0;
  int64_t normal = 0;
  int64_t normal_flagged = 0;

  double injected_rate() const;
  double normal_rate() const;
};

DetectionCounts EvaluateDetection(const TraceLog& trace,
                                  const ScenarioConfig& config, size_t task,
                                  double m_percent, double n_percent);

// Percentage of severe intervals per judged period, bucketed by tens; the
// last bucket holds exactly 100%.
struct SeverityHistogram {
  std::array<int64_t, 11> injected{};
  std::array<int64_t, 11> normal{};
};

SeverityHistogram SevereHistogram(const TraceLog& trace,
                                  const ScenarioConfig& config, size_t task,
                                  double n_percent);

// After each injected period, the run of consecutive missed deadlines among
// the periods that follow it.
struct CascadeStats {
  int64_t events = 0;
  int64_t post_stall_misses = 0;
  int64_t longest = 0;

  double mean() const;
};

CascadeStats MeasureCascades(const TraceLog& trace, size_t task);

}  // namespace stallsim::harness

#endif  // STALLSIM_HARNESS_ANALYSIS_H_
