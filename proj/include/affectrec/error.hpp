// Copyright 2026 The affectrec Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace affectrec {

enum class ErrorKind {
  invalid_parameter,
  shape,
  missing_lexicon_entry,
  degenerate_label,
  insufficient_data,
  divergence,
  invalid_catalog,
  degenerate_embedding,
  unknown_item,
  no_preferences,
  universe,
  label,
  parse,
  duplicate_id,
  missing_va,
  io,
  integrity,
  validation,
  state,
  conflict,
  not_ready,
  not_found,
};

// Process exit categories shared by the CLI.
enum class ErrorCategory { input = 2, domain = 3, integrity = 4 };

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_parameter: return "invalid_parameter";
    case ErrorKind::shape: return "shape";
    case ErrorKind::missing_lexicon_entry: return "missing_lexicon_entry";
    case ErrorKind::degenerate_label: return "degenerate_label";
    case ErrorKind::insufficient_data: return "insufficient_data";
    case ErrorKind::divergence: return "divergence";
    case ErrorKind::invalid_catalog: return "invalid_catalog";
    case ErrorKind::degenerate_embedding: return "degenerate_embedding";
    case ErrorKind::unknown_item: return "unknown_item";
    case ErrorKind::no_preferences: return "no_preferences";
    case ErrorKind::universe: return "universe";
    case ErrorKind::label: return "label";
    case ErrorKind::parse: return "parse";
    case ErrorKind::duplicate_id: return "duplicate_id";
    case ErrorKind::missing_va: return "missing_va";
    case ErrorKind::io: return "io";
    case ErrorKind::integrity: return "integrity";
    case ErrorKind::validation: return "validation";
    case ErrorKind::state: return "state";
    case ErrorKind::conflict: return "conflict";
    case ErrorKind::not_ready: return "not_ready";
    case ErrorKind::not_found: return "not_found";
  }
  return "unknown";
}

constexpr ErrorCategory category_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::io:
    case ErrorKind::parse:
    case ErrorKind::duplicate_id:
    case ErrorKind::missing_va:
    case ErrorKind::validation:
    case ErrorKind::invalid_parameter:
      return ErrorCategory::input;
    case ErrorKind::integrity:
      return ErrorCategory::integrity;
    default:
      return ErrorCategory::domain;
  }
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  ErrorCategory category() const noexcept { return category_of(kind_); }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) fail(kind, message);
}

}  // namespace affectrec
