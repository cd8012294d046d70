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


// Typed accessors over nlohmann::json that report failures with the dotted
// field path, e.g. "tasks[1].touch_rate: expected a number".

#ifndef STALLSIM_HARNESS_JSON_FIELDS_H_
#define STALLSIM_HARNESS_JSON_FIELDS_H_

#include <cstdint>
#include <initializer_list>
#include <string>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/string_view.h"
#include "nlohmann/json.hpp"
#include "stallsim/units.h"

namespace stallsim::harness::json_fields {

using Json = nlohmann::json;

inline std::string Child(absl::string_view path, absl::string_view key) {
  if (path.empty()) return std::string(key);
  return absl::StrCat(path, ".", key);
}

inline std::string Index(absl::string_view path, size_t i) {
  return absl::StrCat(path, "[", i, "]");
}

inline absl::Status Invalid(absl::string_view path, absl::string_view what) {
  return absl::InvalidArgumentError(
      absl::StrCat(path.empty() ? "config" : path, ": ", what));
}

inline absl::Status ExpectObject(const Json& j, absl::string_view path) {
  if (!j.is_object()) return Invalid(path, "expected an object");
  return absl::OkStatus();
}

// Rejects keys outside `allowed`.
inline absl::Status CheckKeys(const Json& j, absl::string_view path,
                              std::initializer_list<absl::string_view> allowed) {
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (absl::string_view a : allowed) known = known || key == a;
    if (!known) return Invalid(Child(path, key), "unknown field");
  }
  return absl::OkStatus();
}

inline absl::Status Read(const Json& j, absl::string_view path, double* out) {
  if (!j.is_number()) return Invalid(path, "expected a number");
  *out = j.get<double>();
  return absl::OkStatus();
}

inline absl::Status Read(const Json& j, absl::string_view path, int64_t* out) {
  if (!j.is_number_integer()) return Invalid(path, "expected an integer");
  *out = j.get<int64_t>();
  return absl::OkStatus();
}

inline absl::Status Read(const Json& j, absl::string_view path, uint64_t* out) {
  if (!j.is_number_unsigned()) {
    return Invalid(path, "expected a non-negative integer");
  }
  *out = j.get<uint64_t>();
  return absl::OkStatus();
}

inline absl::Status Read(const Json& j, absl::string_view path, bool* out) {
  if (!j.is_boolean()) return Invalid(path, "expected true or false");
  *out = j.get<bool>();
  return absl::OkStatus();
}

inline absl::Status Read(const Json& j, absl::string_view path,
                         std::string* out) {
  if (!j.is_string()) return Invalid(path, "expected a string");
  *out = j.get<std::string>();
  return absl::OkStatus();
}

inline absl::Status Read(const Json& j, absl::string_view path, Micros* out) {
  int64_t us = 0;
  if (absl::Status s = Read(j, path, &us); !s.ok()) return s;
  *out = Micros(us);
  return absl::OkStatus();
}

// Reads `key` into `out` when present; leaves `out` untouched otherwise.
template <typename T>
absl::Status ReadOptional(const Json& obj, absl::string_view path,
                          absl::string_view key, T* out) {
  auto it = obj.find(std::string(key));
  if (it == obj.end()) return absl::OkStatus();
  return Read(*it, Child(path, key), out);
}

}  // namespace stallsim::harness::json_fields

#endif  // STALLSIM_HARNESS_JSON_FIELDS_H_
