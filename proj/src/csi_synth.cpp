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

#include "wifisense/csi_synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "wifisense/error.hpp"

namespace wifisense::synth {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

StaticPath path_from_source(const Point3 &source, const Point3 &center, double gain_scale) {
  const double d = distance(source, center);
  return StaticPath{d / kSpeedOfLight, gain_scale / d, std::atan2(source.y - center.y, source.x - center.x)};
}

} // namespace

double distance(const Point3 &a, const Point3 &b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double ChannelConfig::subcarrier_frequency(std::size_t k) const {
  const double spacing = bandwidth_hz / static_cast<double>(subcarriers);
  return carrier_hz + (static_cast<double>(k) - 0.5 * static_cast<double>(subcarriers)) * spacing;
}

void ChannelConfig::validate() const {
  require(subcarriers >= 8, ErrorCode::configuration, "at least 8 subcarriers are required");
  require(!antenna_positions.empty(), ErrorCode::configuration, "no receive antennas");
  require(carrier_hz > 0.0 && bandwidth_hz > 0.0, ErrorCode::configuration, "carrier and bandwidth must be positive");
  require(noise_std >= 0.0, ErrorCode::configuration, "noise std must be non-negative");
  const double half_lambda = 0.5 * wavelength_m();
  for (std::size_t i = 0; i < antenna_positions.size(); ++i) {
    for (std::size_t j = i + 1; j < antenna_positions.size(); ++j) {
      require(distance(antenna_positions[i], antenna_positions[j]) > half_lambda, ErrorCode::configuration,
              "antennas must be spaced by more than half a wavelength");
    }
  }
}

ChannelConfig default_channel_config(std::size_t subcarriers, std::size_t antennas, std::uint64_t seed) {
  ChannelConfig c;
  c.subcarriers = subcarriers;
  c.seed = seed;
  const double spacing = 0.8 * c.wavelength_m();
  for (std::size_t a = 0; a < antennas; ++a) {
    const double offset = (static_cast<double>(a) - 0.5 * static_cast<double>(antennas - 1)) * spacing;
    c.antenna_positions.push_back({c.array_center.x, c.array_center.y + offset, c.array_center.z});
  }

  const Point3 &tx = c.tx_position;
  c.static_paths.push_back(path_from_source(tx, c.array_center, 1.0));
  constexpr double wall_reflection = 0.45;
  const Point3 images[] = {
      {-tx.x, tx.y, tx.z},
      {2.0 * c.room_width_m - tx.x, tx.y, tx.z},
      {tx.x, -tx.y, tx.z},
      {tx.x, 2.0 * c.room_depth_m - tx.y, tx.z},
  };
  for (const auto &img : images) {
    c.static_paths.push_back(path_from_source(img, c.array_center, wall_reflection));
  }
  // Furniture clutter: a few weak paths with seeded geometry.
  std::mt19937_64 rng(mix_seed(seed, 1000));
  std::uniform_real_distribution<double> ux(0.3, c.room_width_m - 0.3);
  std::uniform_real_distribution<double> uy(0.3, c.room_depth_m - 0.3);
  for (int i = 0; i < 4; ++i) {
    const Point3 p{ux(rng), uy(rng), 0.8};
    const double d1 = distance(tx, p);
    const double d2 = distance(p, c.array_center);
    c.static_paths.push_back(StaticPath{(d1 + d2) / kSpeedOfLight, 0.35 / (d1 + d2),
                                        std::atan2(p.y - c.array_center.y, p.x - c.array_center.x)});
  }
  return c;
}

namespace {

/// Smooth seeded variation in [-1, 1]: a few slow sinusoids.
struct Wobble {
  std::array<double, 3> freq{};
  std::array<double, 3> phase{};

  double operator()(double t) const {
    double v = 0.0;
    for (std::size_t i = 0; i < freq.size(); ++i) {
      v += std::sin(kTwoPi * freq[i] * t + phase[i]);
    }
    return v / static_cast<double>(freq.size());
  }
};

Wobble make_wobble(std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> uf(0.04, 0.3);
  std::uniform_real_distribution<double> up(0.0, kTwoPi);
  Wobble w;
  for (std::size_t i = 0; i < w.freq.size(); ++i) {
    w.freq[i] = uf(rng);
    w.phase[i] = up(rng);
  }
  return w;
}

} // namespace

MotionProfile preset_profile(Activity activity, const ChannelConfig &config, std::uint64_t seed) {
  std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(activity)));
  const double phase = std::uniform_real_distribution<double>(0.0, kTwoPi)(rng);
  const Wobble w1 = make_wobble(rng);
  const Wobble w2 = make_wobble(rng);
  const Wobble w3 = make_wobble(rng);
  const double cx = 0.5 * config.room_width_m;
  const double cy = 0.5 * config.room_depth_m;

  MotionProfile p;
  p.activity = ActivityLabel{activity};
  auto loop = [=](double speed, double bob, double cadence) {
    // Elliptical loop around the room centre; pace and radius drift slowly.
    const double rx = 0.28 * config.room_width_m;
    const double ry = 0.27 * config.room_depth_m;
    const double omega = speed / (0.5 * (rx + ry));
    return [=](double t) {
      const double a = omega * t + phase + 0.15 * w1(t);
      const double r = 1.0 + 0.08 * w2(t);
      return Point3{cx + r * rx * std::cos(a), cy + r * ry * std::sin(a),
                    1.0 + bob * (1.0 + 0.3 * w3(t)) * std::sin(kTwoPi * cadence * t)};
    };
  };

  switch (activity) {
  case Activity::walk:
    p.speed_mps = 1.2;
    p.periodicity_hz = 1.8;
    p.body_cross_section = 1.0;
    p.path_fn = loop(p.speed_mps, 0.03, p.periodicity_hz);
    break;
  case Activity::run:
    p.speed_mps = 2.4;
    p.periodicity_hz = 2.8;
    p.body_cross_section = 1.3;
    p.path_fn = loop(p.speed_mps, 0.08, p.periodicity_hz);
    break;
  case Activity::jump: {
    p.speed_mps = 0.0;
    p.periodicity_hz = 1.5;
    p.body_cross_section = 1.0;
    const Point3 spot{cx + 0.8, cy - 1.0, 1.0};
    const double f = p.periodicity_hz;
    p.path_fn = [=](double t) {
      const double h = 0.25 * (1.0 + 0.4 * w1(t));
      return Point3{spot.x + 0.05 * w2(t), spot.y + 0.05 * w3(t),
                    spot.z + h * std::abs(std::sin(std::numbers::pi * f * t + phase))};
    };
    break;
  }
  case Activity::sit: {
    p.speed_mps = 0.0;
    p.periodicity_hz = 0.25;
    p.body_cross_section = 0.8;
    const Point3 spot{cx - 1.3, cy + 1.2, 0.6};
    const double f = p.periodicity_hz;
    p.path_fn = [=](double t) {
      // Breathing plus slow posture shifts.
      return Point3{spot.x + 0.005 * std::sin(kTwoPi * f * t + phase) + 0.01 * w1(t), spot.y + 0.01 * w2(t),
                    spot.z + 0.005 * w3(t)};
    };
    break;
  }
  case Activity::empty:
    p.speed_mps = 0.0;
    p.periodicity_hz = 0.0;
    p.body_cross_section = 0.0;
    p.path_fn = [=](double) { return Point3{cx, cy, 1.0}; };
    break;
  case Activity::squat: {
    p.speed_mps = 0.0;
    p.periodicity_hz = 0.4;
    p.body_cross_section = 0.9;
    const Point3 spot{cx + 0.8, cy - 1.0, 1.0};
    const double f = p.periodicity_hz;
    p.path_fn = [=](double t) {
      const double depth = 0.35 * (1.0 + 0.3 * w1(t));
      return Point3{spot.x + 0.05 * w2(t), spot.y + 0.05 * w3(t),
                    spot.z - depth * 0.5 * (1.0 - std::cos(kTwoPi * f * t + phase))};
    };
    break;
  }
  }
  return p;
}

CsiRecording synthesize_recording(const MotionProfile &profile, const ChannelConfig &config, double duration_s,
                                  double frame_rate_hz) {
  require(duration_s > 0.0 && frame_rate_hz > 0.0, ErrorCode::precondition, "duration and frame rate must be positive");
  config.validate();
  const auto frames = static_cast<std::size_t>(std::llround(duration_s * frame_rate_hz));
  require(frames >= 1, ErrorCode::precondition, "recording would have no frames");
  const std::size_t n_sc = config.subcarriers;
  const std::size_t n_ant = config.antenna_positions.size();

  std::vector<double> freq(n_sc);
  for (std::size_t k = 0; k < n_sc; ++k) {
    freq[k] = config.subcarrier_frequency(k);
  }

  // Static response per antenna and subcarrier.
  std::vector<std::complex<double>> stat(n_ant * n_sc);
  for (std::size_t a = 0; a < n_ant; ++a) {
    const double rx = config.antenna_positions[a].x - config.array_center.x;
    const double ry = config.antenna_positions[a].y - config.array_center.y;
    for (const auto &path : config.static_paths) {
      const double tau = path.delay_s - (rx * std::cos(path.arrival_angle_rad) + ry * std::sin(path.arrival_angle_rad)) / kSpeedOfLight;
      for (std::size_t k = 0; k < n_sc; ++k) {
        stat[a * n_sc + k] += std::polar(path.gain, -kTwoPi * freq[k] * tau);
      }
    }
  }

  std::mt19937_64 rng(config.seed * 0x100000001b3ULL + static_cast<std::uint64_t>(profile.activity.activity) + 7);
  std::normal_distribution<double> noise(0.0, 1.0);

  std::vector<float> values(frames * n_sc * n_ant);
  const bool moving = profile.body_cross_section > 0.0;
  for (std::size_t i = 0; i < frames; ++i) {
    const double t = static_cast<double>(i) / frame_rate_hz;
    const Point3 body = moving ? profile.path_fn(t) : Point3{};
    const double d1 = moving ? distance(config.tx_position, body) : 0.0;
    for (std::size_t a = 0; a < n_ant; ++a) {
      double gain = 0.0;
      double tau = 0.0;
      if (moving) {
        const double d2 = distance(body, config.antenna_positions[a]);
        gain = config.scatter_coefficient * profile.body_cross_section / (d1 * d2);
        tau = (d1 + d2) / kSpeedOfLight;
      }
      for (std::size_t k = 0; k < n_sc; ++k) {
        std::complex<double> h = stat[a * n_sc + k];
        if (moving) {
          h += std::polar(gain, -kTwoPi * freq[k] * tau);
        }
        double mag = std::abs(h);
        if (config.noise_std > 0.0) {
          mag += config.noise_std * noise(rng);
        }
        values[(i * n_sc + k) * n_ant + a] = static_cast<float>(std::max(mag, 0.0));
      }
    }
  }
  return CsiRecording(Shape3{frames, n_sc, n_ant}, std::move(values), frame_rate_hz, profile.activity);
}

std::vector<CsiRecording> standard_suite(const ChannelConfig &config, double duration_s, double frame_rate_hz) {
  std::vector<CsiRecording> out;
  out.reserve(kAllActivities.size());
  for (auto a : kAllActivities) {
    out.push_back(synthesize_recording(preset_profile(a, config, config.seed), config, duration_s, frame_rate_hz));
  }
  return out;
}

} // namespace wifisense::synth
