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

#ifndef STALLSIM_UNITS_H_
#define STALLSIM_UNITS_H_

#include <chrono>
#include <cstdint>

namespace stallsim {

// All simulated time is integral microseconds, the unit PSI reports in.
using Micros = std::chrono::microseconds;

// Fractional microseconds, for quantities such as per-fault cost or an
// evenly divided stall budget that are not whole ticks.
using MicrosF = std::chrono::duration<double, std::micro>;

inline constexpr int64_t kBytesPerMb = int64_t{1} << 20;

inline double ToSeconds(Micros d) {
  return std::chrono::duration<double>(d).count();
}

}  // namespace stallsim

#endif  // STALLSIM_UNITS_H_
