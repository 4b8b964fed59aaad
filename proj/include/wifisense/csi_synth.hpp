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

#include <cstdint>
#include <functional>
#include <vector>

#include "wifisense/activity.hpp"
#include "wifisense/csi_data.hpp"

namespace wifisense::synth {

inline constexpr double kSpeedOfLight = 299792458.0;

struct Point3 {
  double x{0.0};
  double y{0.0};
  double z{0.0};
};

double distance(const Point3 &a, const Point3 &b);

/// A static propagation path seen at the array reference point. The arrival
/// angle (azimuth, radians) gives each antenna its own plane-wave delay offset.
struct StaticPath {
  double delay_s{0.0};
  double gain{0.0};
  double arrival_angle_rad{0.0};
};

struct ChannelConfig {
  double room_width_m{7.5};
  double room_depth_m{6.0};
  Point3 tx_position{0.5, 3.0, 1.0};
  Point3 array_center{7.0, 3.0, 1.0};
  std::vector<StaticPath> static_paths;
  std::vector<Point3> antenna_positions;
  double carrier_hz{5.25e9};
  double bandwidth_hz{160e6};
  std::size_t subcarriers{2048};
  double noise_std{0.002};
  /// Scales the moving-scatterer amplitude relative to free-space static paths.
  double scatter_coefficient{0.5};
  std::uint64_t seed{1};

  [[nodiscard]] double wavelength_m() const { return kSpeedOfLight / carrier_hz; }
  [[nodiscard]] double subcarrier_frequency(std::size_t k) const;
  /// Throws configuration/precondition errors when invariants are broken.
  void validate() const;
};

/// Room of about 45 m^2 with a line-of-sight path, the four first-order wall
/// reflections and a few seeded clutter paths; `antennas` receivers spaced
/// 0.8 wavelength apart along the y axis.
ChannelConfig default_channel_config(std::size_t subcarriers = 2048, std::size_t antennas = 4,
                                     std::uint64_t seed = 1);

struct MotionProfile {
  ActivityLabel activity;
  std::function<Point3(double)> path_fn;
  double body_cross_section{0.0};
  double periodicity_hz{0.0};
  /// Mean horizontal speed in m/s; used to keep presets ordered.
  double speed_mps{0.0};
};

/// Preset motion for one activity. The seed only shifts the motion phase.
MotionProfile preset_profile(Activity activity, const ChannelConfig &config, std::uint64_t seed = 0);

CsiRecording synthesize_recording(const MotionProfile &profile, const ChannelConfig &config, double duration_s,
                                  double frame_rate_hz);

/// Six recordings (five in-distribution classes plus squat) in canonical order.
std::vector<CsiRecording> standard_suite(const ChannelConfig &config, double duration_s, double frame_rate_hz);

} // namespace wifisense::synth
