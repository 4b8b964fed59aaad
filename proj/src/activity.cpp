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

#include "wifisense/activity.hpp"
#include "wifisense/error.hpp"

namespace wifisense {

std::string_view to_string(ErrorCode code) {
  switch (code) {
  case ErrorCode::format: return "format";
  case ErrorCode::corruption: return "corruption";
  case ErrorCode::domain: return "domain";
  case ErrorCode::degenerate: return "degenerate-normalization";
  case ErrorCode::idempotency: return "idempotency";
  case ErrorCode::precondition: return "precondition";
  case ErrorCode::range: return "range";
  case ErrorCode::insufficient_data: return "insufficient-data";
  case ErrorCode::contract: return "contract";
  case ErrorCode::numeric: return "numeric";
  case ErrorCode::configuration: return "configuration";
  case ErrorCode::dimension: return "dimension";
  case ErrorCode::io: return "io";
  }
  return "unknown";
}

std::string_view activity_name(Activity a) {
  switch (a) {
  case Activity::walk: return "walk";
  case Activity::run: return "run";
  case Activity::jump: return "jump";
  case Activity::sit: return "sit";
  case Activity::empty: return "empty";
  case Activity::squat: return "squat";
  }
  return "unknown";
}

std::optional<Activity> parse_activity(std::string_view name) {
  for (auto a : kAllActivities) {
    if (activity_name(a) == name) {
      return a;
    }
  }
  return std::nullopt;
}

std::string_view ActivityLabel::name() const { return activity_name(activity); }

std::size_t ActivityLabel::class_index() const {
  require(in_distribution(), ErrorCode::contract, "out-of-distribution label has no class index");
  return static_cast<std::size_t>(activity);
}

ActivityLabel label_from_class_index(std::size_t k) {
  require(k < kNumClasses, ErrorCode::range, "class index out of range");
  return ActivityLabel{kInDistribution[k]};
}

} // namespace wifisense
