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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "support.hpp"
#include "wifisense/csi_synth.hpp"

using namespace wifisense;
using namespace wifisense::synth;

namespace {

// Mean over subcarriers and antennas of the per-bin temporal variance.
double temporal_variance(const CsiRecording &r) {
  const auto &s = r.shape();
  double total = 0.0;
  for (std::size_t k = 0; k < s.subcarriers; ++k) {
    for (std::size_t a = 0; a < s.antennas; ++a) {
      double m = 0.0, m2 = 0.0;
      for (std::size_t f = 0; f < s.frames; ++f) {
        const double v = r.at(f, k, a);
        m += v;
        m2 += v * v;
      }
      m /= static_cast<double>(s.frames);
      total += m2 / static_cast<double>(s.frames) - m * m;
    }
  }
  return total / static_cast<double>(s.subcarriers * s.antennas);
}

double pearson(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

} // namespace

TEST_SUITE("csi_synth") {

TEST_CASE("default channel geometry") {
  const auto c = default_channel_config(64, 4, 3);
  CHECK(c.antenna_positions.size() == 4);
  CHECK(c.static_paths.size() == 9);
  CHECK(c.room_width_m * c.room_depth_m == doctest::Approx(45.0));
  CHECK_NOTHROW(c.validate());
  CHECK(c.subcarrier_frequency(63) - c.subcarrier_frequency(0) ==
        doctest::Approx(c.bandwidth_hz * 63.0 / 64.0).epsilon(1e-9));

  auto bad = c;
  bad.subcarriers = 4;
  WS_CHECK_ERROR(bad.validate(), ErrorCode::configuration);
  bad = c;
  bad.antenna_positions[1] = bad.antenna_positions[0];
  WS_CHECK_ERROR(bad.validate(), ErrorCode::configuration);
}

TEST_CASE("empty room without noise is time-constant") {
  auto c = default_channel_config(16, 2, 1);
  c.noise_std = 0.0;
  const auto r = synthesize_recording(preset_profile(Activity::empty, c), c, 2.0, 10.0);
  for (std::size_t f = 1; f < r.shape().frames; ++f) {
    for (std::size_t k = 0; k < 16; ++k) {
      for (std::size_t a = 0; a < 2; ++a) {
        REQUIRE(r.at(f, k, a) == r.at(0, k, a));
      }
    }
  }
}

TEST_CASE("walking varies more than the empty room") {
  const auto c = default_channel_config(32, 4, 2);
  const auto walk = synthesize_recording(preset_profile(Activity::walk, c, 2), c, 6.0, 20.0);
  const auto empty = synthesize_recording(preset_profile(Activity::empty, c, 2), c, 6.0, 20.0);
  CHECK(temporal_variance(walk) > temporal_variance(empty));
  CHECK(walk.at(5, 3, 0) != walk.at(6, 3, 0));
}

TEST_CASE("synthesis is deterministic per seed") {
  const auto c = default_channel_config(16, 4, 5);
  const auto a = synthesize_recording(preset_profile(Activity::jump, c, 5), c, 2.0, 20.0);
  const auto b = synthesize_recording(preset_profile(Activity::jump, c, 5), c, 2.0, 20.0);
  CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
  const auto c2 = default_channel_config(16, 4, 6);
  const auto d = synthesize_recording(preset_profile(Activity::jump, c2, 6), c2, 2.0, 20.0);
  CHECK_FALSE(std::equal(a.values().begin(), a.values().end(), d.values().begin()));
}

TEST_CASE("suite sizes") {
  const auto full = standard_suite(default_channel_config(8, 4, 1), 80.0, 150.0);
  REQUIRE(full.size() == 6);
  for (std::size_t i = 0; i < full.size(); ++i) {
    CHECK(full[i].shape().frames == 12000);
    CHECK(full[i].activity().activity == kAllActivities[i]);
  }
  const auto desk = standard_suite(default_channel_config(64, 4, 1), 4.0, 10.0);
  REQUIRE(desk.size() == 6);
  for (const auto &r : desk) {
    CHECK(r.shape() == Shape3{40, 64, 4});
    CHECK(r.frame_rate_hz() == 10.0);
    CHECK(std::all_of(r.values().begin(), r.values().end(), [](float v) { return v >= 0.F && std::isfinite(v); }));
  }
}

TEST_CASE("variance ordering run > walk > sit holds across seeds") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto c = default_channel_config(32, 4, seed);
    const auto run = temporal_variance(synthesize_recording(preset_profile(Activity::run, c, seed), c, 10.0, 100.0));
    const auto walk =
        temporal_variance(synthesize_recording(preset_profile(Activity::walk, c, seed), c, 10.0, 100.0));
    const auto sit = temporal_variance(synthesize_recording(preset_profile(Activity::sit, c, seed), c, 10.0, 100.0));
    CAPTURE(seed);
    CHECK(run > walk);
    CHECK(walk > sit);
  }
}

TEST_CASE("nearest-centroid on window mean and variance beats 60%") {
  const auto c = default_channel_config(64, 4, 7);
  const auto suite = standard_suite(c, 24.0, 100.0);
  const double norm = compute_norm_constant(suite);
  std::vector<std::array<double, 2>> centroid(kNumClasses, {0.0, 0.0});
  struct Item {
    std::array<double, 2> x;
    std::size_t y;
  };
  std::vector<Item> train, test;
  for (std::size_t cls = 0; cls < kNumClasses; ++cls) {
    const auto windows = sliding_windows(normalize(suite[cls], norm), 0.4, 10);
    for (std::size_t i = 0; i < windows.size(); ++i) {
      const auto &v = windows[i].values;
      double m = 0.0, m2 = 0.0;
      for (float x : v) {
        m += x;
        m2 += static_cast<double>(x) * x;
      }
      m /= static_cast<double>(v.size());
      const Item item{{m, m2 / static_cast<double>(v.size()) - m * m}, cls};
      (i % 2 == 0 ? train : test).push_back(item);
    }
  }
  // Standardize both features on the training half, then classify the other half.
  std::array<double, 2> mean{}, sd{};
  for (int d = 0; d < 2; ++d) {
    for (const auto &it : train) {
      mean[d] += it.x[d];
    }
    mean[d] /= static_cast<double>(train.size());
    for (const auto &it : train) {
      sd[d] += (it.x[d] - mean[d]) * (it.x[d] - mean[d]);
    }
    sd[d] = std::sqrt(sd[d] / static_cast<double>(train.size()));
  }
  std::vector<double> counts(kNumClasses, 0.0);
  for (const auto &it : train) {
    for (int d = 0; d < 2; ++d) {
      centroid[it.y][d] += (it.x[d] - mean[d]) / sd[d];
    }
    counts[it.y] += 1.0;
  }
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    centroid[k][0] /= counts[k];
    centroid[k][1] /= counts[k];
  }
  std::size_t correct = 0;
  for (const auto &it : test) {
    std::size_t best = 0;
    double best_d = 1e300;
    for (std::size_t k = 0; k < kNumClasses; ++k) {
      const double d0 = (it.x[0] - mean[0]) / sd[0] - centroid[k][0];
      const double d1 = (it.x[1] - mean[1]) / sd[1] - centroid[k][1];
      if (d0 * d0 + d1 * d1 < best_d) {
        best_d = d0 * d0 + d1 * d1;
        best = k;
      }
    }
    correct += best == it.y ? 1 : 0;
  }
  const double acc = static_cast<double>(correct) / static_cast<double>(test.size());
  MESSAGE("nearest-centroid accuracy " << acc);
  CHECK(acc > 0.60);
}

TEST_CASE("antenna channels are decorrelated") {
  const auto c = default_channel_config(64, 4, 4);
  const auto suite = standard_suite(c, 6.0, 100.0);
  double total = 0.0;
  std::size_t pairs = 0;
  for (const auto &r : suite) {
    const auto &s = r.shape();
    std::vector<std::vector<double>> ch(s.antennas);
    for (std::size_t f = 0; f < s.frames; ++f) {
      for (std::size_t k = 0; k < s.subcarriers; ++k) {
        for (std::size_t a = 0; a < s.antennas; ++a) {
          ch[a].push_back(r.at(f, k, a));
        }
      }
    }
    for (std::size_t a = 0; a < s.antennas; ++a) {
      for (std::size_t b = a + 1; b < s.antennas; ++b) {
        total += std::abs(pearson(ch[a], ch[b]));
        ++pairs;
      }
    }
  }
  const double mean_abs = total / static_cast<double>(pairs);
  MESSAGE("mean |corr| between antennas " << mean_abs);
  CHECK(mean_abs < 0.9);
}

TEST_CASE("presets keep speeds ordered") {
  const auto c = default_channel_config(16, 4, 1);
  CHECK(preset_profile(Activity::run, c).speed_mps > preset_profile(Activity::walk, c).speed_mps);
  CHECK(preset_profile(Activity::walk, c).speed_mps > preset_profile(Activity::sit, c).speed_mps);
  CHECK(preset_profile(Activity::empty, c).body_cross_section == 0.0);
}

} // TEST_SUITE
