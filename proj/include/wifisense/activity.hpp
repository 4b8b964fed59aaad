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

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace wifisense {

/// Activities recorded in the dataset. The first five are the in-distribution
/// classes, in the order used for class indices; squat is held out for OOD.
enum class Activity { walk = 0, run = 1, jump = 2, sit = 3, empty = 4, squat = 5 };

inline constexpr std::size_t kNumClasses = 5;

inline constexpr std::array<Activity, 6> kAllActivities = {
    Activity::walk, Activity::run, Activity::jump, Activity::sit, Activity::empty, Activity::squat};

inline constexpr std::array<Activity, kNumClasses> kInDistribution = {
    Activity::walk, Activity::run, Activity::jump, Activity::sit, Activity::empty};

struct ActivityLabel {
  Activity activity{Activity::empty};

  [[nodiscard]] std::string_view name() const;
  [[nodiscard]] bool in_distribution() const { return activity != Activity::squat; }
  /// Class index in [0, K) for in-distribution labels.
  [[nodiscard]] std::size_t class_index() const;

  friend bool operator==(const ActivityLabel &, const ActivityLabel &) = default;
};

std::string_view activity_name(Activity a);
std::optional<Activity> parse_activity(std::string_view name);
ActivityLabel label_from_class_index(std::size_t k);

} // namespace wifisense
