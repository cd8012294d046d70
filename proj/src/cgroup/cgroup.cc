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


#include <algorithm>
#include <fstream>
#include <sstream>
#include <vector>

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "stallsim/cgroup.h"

namespace stallsim::cgroup {
namespace {

absl::Status Malformed(absl::string_view token, size_t line,
                       absl::string_view why) {
  return absl::InvalidArgumentError(absl::StrCat(
      "line ", line, ": ", why, " in token \"", token, "\""));
}

absl::StatusOr<PressureReading> ParseLine(absl::string_view line,
                                          size_t line_number) {
  std::vector<absl::string_view> tokens =
      absl::StrSplit(line, absl::ByAnyChar(" \t\r"), absl::SkipEmpty());
  PressureReading reading;
  if (tokens.front() == "some") {
    reading.line_kind = LineKind::kSome;
  } else if (tokens.front() == "full") {
    reading.line_kind = LineKind::kFull;
  } else {
    return Malformed(tokens.front(), line_number, "unknown line kind");
  }
  bool seen[4] = {false, false, false, false};
  for (size_t i = 1; i < tokens.size(); ++i) {
    const absl::string_view token = tokens[i];
    const size_t eq = token.find('=');
    if (eq == absl::string_view::npos || eq == 0) {
      return Malformed(token, line_number, "expected key=value");
    }
    const absl::string_view key = token.substr(0, eq);
    const absl::string_view value = token.substr(eq + 1);
    double* avg = nullptr;
    int slot = -1;
    if (key == "avg10") {
      avg = &reading.avg10;
      slot = 0;
    } else if (key == "avg60") {
      avg = &reading.avg60;
      slot = 1;
    } else if (key == "avg300") {
      avg = &reading.avg300;
      slot = 2;
    } else if (key == "total") {
      slot = 3;
    } else {
      continue;
    }
    if (seen[slot]) return Malformed(token, line_number, "repeated key");
    seen[slot] = true;
    if (avg != nullptr) {
      if (!absl::SimpleAtod(value, avg) || !(*avg >= 0.0 && *avg <= 100.0)) {
        return Malformed(token, line_number, "expected a percentage");
      }
    } else {
      int64_t total = 0;
      if (!absl::SimpleAtoi(value, &total) || total < 0) {
        return Malformed(token, line_number, "expected a microsecond count");
      }
      reading.total = Micros(total);
    }
  }
  static constexpr const char* kKeys[] = {"avg10=", "avg60=", "avg300=",
                                          "total="};
  for (int k = 0; k < 4; ++k) {
    if (!seen[k]) {
      return absl::InvalidArgumentError(absl::StrCat(
          "line ", line_number, ": missing ", kKeys[k], " in \"", line, "\""));
    }
  }
  return reading;
}

absl::StatusOr<std::string> ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot read ", path.string()));
  std::ostringstream text;
  text << in.rdbuf();
  if (in.bad()) {
    return absl::DataLossError(absl::StrCat("read failed: ", path.string()));
  }
  return text.str();
}

absl::Status WithPath(const absl::Status& status,
                      const std::filesystem::path& path) {
  return absl::Status(status.code(),
                      absl::StrCat(path.string(), ": ", status.message()));
}

}  // namespace

absl::StatusOr<PressureFile> ParsePressure(std::string_view text) {
  PressureFile file;
  bool have_some = false;
  std::vector<absl::string_view> lines =
      absl::StrSplit(absl::string_view(text.data(), text.size()), '\n');
  for (size_t i = 0; i < lines.size(); ++i) {
    if (absl::StripAsciiWhitespace(lines[i]).empty()) continue;
    absl::StatusOr<PressureReading> reading = ParseLine(lines[i], i + 1);
    if (!reading.ok()) return reading.status();
    if (reading->line_kind == LineKind::kSome) {
      if (have_some) {
        return absl::InvalidArgumentError(
            absl::StrCat("line ", i + 1, ": duplicate \"some\" line"));
      }
      have_some = true;
      file.some = *reading;
    } else {
      if (file.full.has_value()) {
        return absl::InvalidArgumentError(
            absl::StrCat("line ", i + 1, ": duplicate \"full\" line"));
      }
      file.full = *reading;
    }
  }
  if (!have_some) {
    return absl::InvalidArgumentError("missing \"some\" line");
  }
  return file;
}

std::string RenderPressure(const PressureFile& file) {
  auto line = [](absl::string_view kind, const PressureReading& r) {
    return absl::StrFormat("%s avg10=%.2f avg60=%.2f avg300=%.2f total=%d\n",
                           kind, r.avg10, r.avg60, r.avg300, r.total.count());
  };
  std::string out = line("some", file.some);
  if (file.full.has_value()) out += line("full", *file.full);
  return out;
}

BackendSample StallDeltaTracker::Update(Micros mem_total, Micros io_total,
                                        Micros l_intv) {
  BackendSample out;
  out.sample.interval_index = next_index_++;
  if (mem_total < last_mem_ || io_total < last_io_) {
    last_mem_ = mem_total;
    last_io_ = io_total;
    pending_mem_ = Micros::zero();
    pending_io_ = Micros::zero();
    out.reset = true;
    return out;
  }
  const Micros cap = std::max(l_intv, Micros::zero());
  pending_mem_ += mem_total - last_mem_;
  pending_io_ += io_total - last_io_;
  last_mem_ = mem_total;
  last_io_ = io_total;
  out.sample.s_mem = std::min(pending_mem_, cap);
  out.sample.s_io = std::min(pending_io_, cap);
  pending_mem_ -= out.sample.s_mem;
  pending_io_ -= out.sample.s_io;
  return out;
}

absl::StatusOr<PressureFile> ReadPressureFile(
    const std::filesystem::path& path) {
  absl::StatusOr<std::string> text = ReadFile(path);
  if (!text.ok()) return text.status();
  absl::StatusOr<PressureFile> file = ParsePressure(*text);
  if (!file.ok()) return WithPath(file.status(), path);
  return file;
}

absl::StatusOr<GroupHandle> GroupHandle::Open(std::filesystem::path path) {
  std::error_code ec;
  if (!std::filesystem::is_directory(path, ec)) {
    return absl::NotFoundError(
        absl::StrCat("cgroup directory not found: ", path.string()));
  }
  for (const char* name : {"memory.pressure", "io.pressure", "memory.high"}) {
    if (!std::filesystem::exists(path / name, ec)) {
      return absl::NotFoundError(
          absl::StrCat("missing ", (path / name).string()));
    }
  }
  absl::StatusOr<PressureFile> mem = ReadPressureFile(path / "memory.pressure");
  if (!mem.ok()) return mem.status();
  absl::StatusOr<PressureFile> io = ReadPressureFile(path / "io.pressure");
  if (!io.ok()) return io.status();
  return GroupHandle(std::move(path),
                     StallDeltaTracker(mem->some.total, io->some.total));
}

absl::StatusOr<BackendSample> GroupHandle::Sample(Micros l_intv) {
  absl::StatusOr<PressureFile> mem = ReadPressureFile(path_ / "memory.pressure");
  if (!mem.ok()) return mem.status();
  absl::StatusOr<PressureFile> io = ReadPressureFile(path_ / "io.pressure");
  if (!io.ok()) return io.status();
  return tracker_.Update(mem->some.total, io->some.total, l_intv);
}

absl::Status GroupHandle::ApplyLimit(int64_t limit_mb) {
  if (limit_mb < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("limit must be at least 1 MB, got ", limit_mb));
  }
  const std::filesystem::path file = path_ / "memory.high";
  const int64_t bytes = limit_mb * kBytesPerMb;
  {
    std::ofstream out(file, std::ios::trunc);
    if (!out) {
      return absl::PermissionDeniedError(
          absl::StrCat("cannot open ", file.string(), " for writing"));
    }
    out << bytes << "\n";
    out.close();
    if (!out) {
      return absl::DataLossError(absl::StrCat("write failed: ", file.string()));
    }
  }
  absl::StatusOr<std::optional<int64_t>> back = ReadLimit();
  if (!back.ok()) return back.status();
  if (*back != bytes) {
    return absl::DataLossError(absl::StrCat(
        file.string(), ": wrote ", bytes, ", read back ",
        back->has_value() ? absl::StrCat(**back) : std::string("max")));
  }
  return absl::OkStatus();
}

absl::StatusOr<std::optional<int64_t>> GroupHandle::ReadLimit() const {
  const std::filesystem::path file = path_ / "memory.high";
  absl::StatusOr<std::string> text = ReadFile(file);
  if (!text.ok()) return text.status();
  const absl::string_view value = absl::StripAsciiWhitespace(*text);
  if (value == "max") return std::optional<int64_t>();
  int64_t bytes = 0;
  if (!absl::SimpleAtoi(value, &bytes) || bytes < 0) {
    return absl::InvalidArgumentError(absl::StrCat(
        file.string(), ": unexpected content \"", value, "\""));
  }
  return std::optional<int64_t>(bytes);
}

}  // namespace stallsim::cgroup
