// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The wifisense Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wifisense {

enum class ErrorCode {
  format,          // malformed or missing on-disk artifact
  corruption,      // byte counts or shapes disagree with metadata
  domain,          // value outside its mathematical domain (negative magnitude, evidence)
  degenerate,      // all-zero data where a positive scale is required
  idempotency,     // operation applied twice (e.g. double normalization)
  precondition,    // caller violated a documented precondition
  range,           // index or length out of range
  insufficient_data,
  contract,        // shape / length mismatch between collaborating objects
  numeric,         // non-finite value produced or consumed
  configuration,   // inconsistent model / architecture wiring
  dimension,
  io,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string &what)
      : std::runtime_error(std::string(to_string(code)) + " error: " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string &what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string &what) {
  if (!cond) {
    throw Error(code, what);
  }
}

} // namespace wifisense
