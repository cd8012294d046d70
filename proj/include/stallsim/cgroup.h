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


#ifndef STALLSIM_CGROUP_H_
#define STALLSIM_CGROUP_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "stallsim/metrics.h"
#include "stallsim/units.h"

namespace stallsim::cgroup {

enum class LineKind { kSome, kFull };

// One line of a cgroup v2 *.pressure file.
struct PressureReading {
  LineKind line_kind = LineKind::kSome;
  double avg10 = 0.0;
  double avg60 = 0.0;
  double avg300 = 0.0;
  // Cumulative stall time; never decreases while the group lives.
  Micros total{0};

  friend bool operator==(const PressureReading&,
                         const PressureReading&) = default;
};

struct PressureFile {
  PressureReading some{.line_kind = LineKind::kSome};
  // Absent in files that only report "some" (e.g. cpu.pressure on some
  // kernels).
  std::optional<PressureReading> full;

  friend bool operator==(const PressureFile&, const PressureFile&) = default;
};

// Parses `some avg10=F avg60=F avg300=F total=U` and an optional `full` line.
// Whitespace between tokens is free; unknown key=value tokens are ignored.
// Errors quote the offending token or line.
absl::StatusOr<PressureFile> ParsePressure(std::string_view text);

// Kernel layout: averages with two decimals, total in microseconds.
std::string RenderPressure(const PressureFile& file);

// Result of one sampling tick.
struct BackendSample {
  metrics::StallSample sample;
  // A counter went backwards (the group was recreated); the baseline was
  // reset and the sample is zero.
  bool reset = false;
};

// Turns cumulative some.total counters into per-interval stall samples. Each
// field is capped at l_intv; the excess is carried into later samples so
// that, absent resets, samples plus the carried backlog always add up to the
// counter advance.
class StallDeltaTracker {
 public:
  StallDeltaTracker(Micros mem_total, Micros io_total)
      : last_mem_(mem_total), last_io_(io_total) {}

  BackendSample Update(Micros mem_total, Micros io_total, Micros l_intv);

  Micros pending_mem() const { return pending_mem_; }
  Micros pending_io() const { return pending_io_; }

 private:
  Micros last_mem_;
  Micros last_io_;
  Micros pending_mem_{0};
  Micros pending_io_{0};
  int64_t next_index_ = 0;
};

// A cgroup v2 directory exposing memory.pressure, io.pressure and
// memory.high. Single owner; not thread-safe.
class GroupHandle {
 public:
  // Fails with NotFound naming the path when the directory or one of the
  // three files is missing. Reads the current totals as the baseline.
  static absl::StatusOr<GroupHandle> Open(std::filesystem::path path);

  const std::filesystem::path& path() const { return path_; }

  // Stall since the previous call (or since Open).
  absl::StatusOr<BackendSample> Sample(Micros l_intv);

  // Writes limit_mb in bytes to memory.high and confirms by reading back.
  absl::Status ApplyLimit(int64_t limit_mb);

  // Current memory.high in bytes; nullopt for "max".
  absl::StatusOr<std::optional<int64_t>> ReadLimit() const;

 private:
  GroupHandle(std::filesystem::path path, StallDeltaTracker tracker)
      : path_(std::move(path)), tracker_(tracker) {}

  std::filesystem::path path_;
  StallDeltaTracker tracker_;
};

// Reads one pressure file.
absl::StatusOr<PressureFile> ReadPressureFile(
    const std::filesystem::path& path);

}  // namespace stallsim::cgroup

#endif  // STALLSIM_CGROUP_H_
