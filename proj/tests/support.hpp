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
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include <doctest.h>

#include "wifisense/csi_data.hpp"
#include "wifisense/error.hpp"

namespace wstest {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
  explicit TempDir(const std::string &tag) {
    static std::uint64_t counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("wifisense_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;
  [[nodiscard]] const std::filesystem::path &path() const { return path_; }

private:
  std::filesystem::path path_;
};

/// The error code raised by `fn`, or nothing if it did not throw an Error.
inline std::optional<wifisense::ErrorCode> error_code_of(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const wifisense::Error &e) {
    return e.code();
  }
  return std::nullopt;
}

#define WS_CHECK_ERROR(expr, code_value)                                                                              \
  CHECK(::wstest::error_code_of([&] { (void)(expr); }) == std::optional<wifisense::ErrorCode>(code_value))

inline wifisense::CsiRecording uniform_recording(wifisense::Shape3 shape, float lo, float hi, std::uint64_t seed,
                                                 wifisense::Activity a = wifisense::Activity::walk,
                                                 double fps = 10.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(lo, hi);
  std::vector<float> v(shape.size());
  for (auto &x : v) {
    x = u(rng);
  }
  return {shape, std::move(v), fps, wifisense::ActivityLabel{a}};
}

/// Random normalized window with the given geometry.
inline wifisense::CsiWindow random_window(std::size_t frames, std::size_t subcarriers, std::size_t channels,
                                          std::uint64_t seed, wifisense::Activity a = wifisense::Activity::walk) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(0.0F, 1.0F);
  wifisense::CsiWindow w;
  w.frames = frames;
  w.subcarriers = subcarriers;
  w.channels = channels;
  w.label = wifisense::ActivityLabel{a};
  w.values.resize(frames * subcarriers * channels);
  for (auto &x : w.values) {
    x = u(rng);
  }
  return w;
}

} // namespace wstest
