// Copyright 2026 The Relightkit Authors. All Rights Reserved.
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

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace relightkit {

enum class ErrorCode {
  kInvalidInput,
  kFormat,
  kIo,
  kDegenerateExposure,
  kDegenerateColor,
  kNoLight,
  kUndefinedRatio,
  kSampler,
  kReconciliation,
  kNotFound,
};

// Stable machine-readable names, used in service payloads and CLI output.
inline std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidInput: return "invalid_input";
    case ErrorCode::kFormat: return "format_error";
    case ErrorCode::kIo: return "io_error";
    case ErrorCode::kDegenerateExposure: return "degenerate_exposure";
    case ErrorCode::kDegenerateColor: return "degenerate_color";
    case ErrorCode::kNoLight: return "no_light";
    case ErrorCode::kUndefinedRatio: return "undefined_ratio";
    case ErrorCode::kSampler: return "sampler_error";
    case ErrorCode::kReconciliation: return "reconciliation_error";
    case ErrorCode::kNotFound: return "not_found";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

  // Set for format errors raised while decoding a byte stream.
  std::optional<std::size_t> byte_offset() const { return byte_offset_; }
  // Set when the error concerns a single named parameter.
  const std::string& field() const { return field_; }

  Error with_context(const std::string& prefix) const {
    Error e(code_, prefix + ": " + what());
    e.byte_offset_ = byte_offset_;
    e.field_ = field_;
    return e;
  }

  static Error format_at(std::size_t offset, const std::string& message) {
    Error e(ErrorCode::kFormat,
            message + " (at byte offset " + std::to_string(offset) + ")");
    e.byte_offset_ = offset;
    return e;
  }

  // A malformed or missing entry in structured text.
  static Error format_field(const std::string& field, const std::string& message) {
    Error e(ErrorCode::kFormat, message);
    e.field_ = field;
    return e;
  }

  static Error invalid_field(const std::string& field,
                             const std::string& message) {
    Error e(ErrorCode::kInvalidInput, field + ": " + message);
    e.field_ = field;
    return e;
  }

 private:
  ErrorCode code_;
  std::optional<std::size_t> byte_offset_;
  std::string field_;
};

}  // namespace relightkit
