// ----------------------------------------------------------------------------
// Copyright 2026 The ProxLab Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ----------------------------------------------------------------------------
#pragma once

#include <stdexcept>
#include <string>

namespace proxlab {

/// Failure categories. The C API maps these one-to-one onto status codes.
enum class ErrorCode {
  invalid_argument = 1,
  invalid_state,
  numeric_overflow,
  domain_error,
  numeric_error,
  parse_error,
  io_error,
  internal,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::invalid_state: return "invalid-state";
    case ErrorCode::numeric_overflow: return "numeric-overflow";
    case ErrorCode::domain_error: return "domain-error";
    case ErrorCode::numeric_error: return "numeric-error";
    case ErrorCode::parse_error: return "parse-error";
    case ErrorCode::io_error: return "io-error";
    case ErrorCode::internal: return "internal";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, ErrorCode code, const char* what) {
  if (!ok) throw Error(code, what);
}

}  // namespace proxlab
