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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wifisense/activity.hpp"

namespace wifisense {

struct Shape3 {
  std::size_t frames{0};
  std::size_t subcarriers{0};
  std::size_t antennas{0};

  [[nodiscard]] std::size_t size() const { return frames * subcarriers * antennas; }
  friend bool operator==(const Shape3 &, const Shape3 &) = default;
};

/// One activity's magnitude CSI stream, stored row-major as
/// frames x subcarriers x antennas. Immutable once constructed.
class CsiRecording {
public:
  CsiRecording(Shape3 shape, std::vector<float> values, double frame_rate_hz, ActivityLabel activity);

  [[nodiscard]] const Shape3 &shape() const { return shape_; }
  [[nodiscard]] std::span<const float> values() const { return values_; }
  [[nodiscard]] double frame_rate_hz() const { return frame_rate_hz_; }
  [[nodiscard]] ActivityLabel activity() const { return activity_; }
  [[nodiscard]] bool normalized() const { return normalized_; }
  /// Set when normalization used a constant smaller than this recording's maximum.
  [[nodiscard]] bool exceeds_unit_range() const { return exceeds_unit_range_; }

  [[nodiscard]] float at(std::size_t frame, std::size_t subcarrier, std::size_t antenna) const {
    return values_[(frame * shape_.subcarriers + subcarrier) * shape_.antennas + antenna];
  }
  [[nodiscard]] float max_value() const;

private:
  friend CsiRecording normalize(const CsiRecording &, double);

  Shape3 shape_;
  std::vector<float> values_;
  double frame_rate_hz_{150.0};
  ActivityLabel activity_;
  bool normalized_{false};
  bool exceeds_unit_range_{false};
};

/// A normalized slice of a recording: win_frames x subcarriers x channels.
struct CsiWindow {
  std::size_t frames{0};
  std::size_t subcarriers{0};
  std::size_t channels{0};
  std::vector<float> values;
  ActivityLabel label;
  std::size_t source_offset{0};

  [[nodiscard]] float at(std::size_t f, std::size_t s, std::size_t c) const {
    return values[(f * subcarriers + s) * channels + c];
  }
};

enum class SplitPolicy { chronological_tail, random };

std::string to_string(SplitPolicy policy);
SplitPolicy parse_split_policy(const std::string &name);

struct DatasetSplit {
  std::vector<CsiWindow> train;
  std::vector<CsiWindow> test;
  SplitPolicy split_policy{SplitPolicy::chronological_tail};
  double test_fraction{0.2};
  std::uint64_t seed{0};
};

/// Sidecar describing a dataset directory (`manifest.json`).
struct DatasetManifest {
  std::map<Activity, Shape3> activities;
  double frame_rate_hz{150.0};
  std::optional<double> norm_constant;
  std::string magnitude_units{"arbitrary"};
};

inline constexpr const char *kManifestFile = "manifest.json";

DatasetManifest read_manifest(const std::filesystem::path &dir);
void write_manifest(const std::filesystem::path &dir, const DatasetManifest &manifest);

/// Writes `<activity>.bin` for every recording plus the manifest.
void write_dataset(const std::filesystem::path &dir, std::span<const CsiRecording> recordings,
                   std::optional<double> norm_constant = std::nullopt);

/// Loads every recording listed in the directory's manifest, in canonical
/// activity order. Recordings come back un-normalized.
std::vector<CsiRecording> load_recordings(const std::filesystem::path &dir);

/// FNV-1a over the manifest and every listed .bin, as 16 hex digits.
std::string dataset_hash(const std::filesystem::path &dir);

double compute_norm_constant(std::span<const CsiRecording> recordings);
CsiRecording normalize(const CsiRecording &recording, double constant);

/// frame_rate x window_seconds, which must be a positive whole number of frames.
std::size_t window_frames(double frame_rate_hz, double window_seconds);
std::size_t window_count(std::size_t frames, std::size_t win_frames, std::size_t stride);

CsiWindow extract_window(const CsiRecording &recording, std::size_t offset, std::size_t win_frames,
                         std::optional<std::size_t> antenna = std::nullopt);

std::vector<CsiWindow> sliding_windows(const CsiRecording &recording, double window_seconds = 3.0,
                                       std::size_t stride_frames = 1,
                                       std::optional<std::size_t> antenna = std::nullopt);

/// Single-channel view of channel `channel` of a stacked window.
CsiWindow select_channel(const CsiWindow &window, std::size_t channel);

/// Number of test items for a class of `n` windows.
std::size_t test_count(std::size_t n, double test_fraction);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Index-level split of one class's windows (in source order).
SplitIndices split_indices(std::size_t n, double test_fraction, SplitPolicy policy, std::uint64_t seed);

DatasetSplit split_dataset(std::span<const std::vector<CsiWindow>> per_class, double test_fraction,
                           SplitPolicy policy, std::uint64_t seed);

} // namespace wifisense
