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

#include "wifisense/csi_data.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

#include "wifisense/error.hpp"

namespace wifisense {

namespace fs = std::filesystem;
using nlohmann::json;

CsiRecording::CsiRecording(Shape3 shape, std::vector<float> values, double frame_rate_hz,
                           ActivityLabel activity)
    : shape_(shape), values_(std::move(values)), frame_rate_hz_(frame_rate_hz), activity_(activity) {
  require(shape_.frames >= 1 && shape_.subcarriers >= 1 && shape_.antennas >= 1, ErrorCode::precondition,
          "recording dimensions must be positive");
  require(values_.size() == shape_.size(), ErrorCode::corruption, "recording value count does not match shape");
  require(frame_rate_hz_ > 0.0 && std::isfinite(frame_rate_hz_), ErrorCode::precondition,
          "frame rate must be positive");
  for (float v : values_) {
    if (!(v >= 0.0F) || !std::isfinite(v)) {
      fail(ErrorCode::domain, "CSI magnitudes must be finite and non-negative");
    }
  }
}

float CsiRecording::max_value() const { return *std::max_element(values_.begin(), values_.end()); }

std::string to_string(SplitPolicy policy) {
  return policy == SplitPolicy::chronological_tail ? "chronological-tail" : "random";
}

SplitPolicy parse_split_policy(const std::string &name) {
  if (name == "chronological-tail") {
    return SplitPolicy::chronological_tail;
  }
  if (name == "random") {
    return SplitPolicy::random;
  }
  fail(ErrorCode::precondition, "unknown split policy '" + name + "'");
}

// ---------------------------------------------------------------------------
// On-disk format

DatasetManifest read_manifest(const fs::path &dir) {
  const fs::path path = dir / kManifestFile;
  std::ifstream in(path);
  if (!in) {
    fail(ErrorCode::format, "missing " + path.string());
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception &e) {
    fail(ErrorCode::format, path.string() + ": " + e.what());
  }
  DatasetManifest m;
  try {
    for (const auto &[name, dims] : j.at("activities").items()) {
      auto a = parse_activity(name);
      require(a.has_value(), ErrorCode::format, "unknown activity '" + name + "' in manifest");
      require(dims.is_array() && dims.size() == 3, ErrorCode::format, "activity shape must be [frames, subcarriers, antennas]");
      m.activities[*a] = Shape3{dims[0].get<std::size_t>(), dims[1].get<std::size_t>(), dims[2].get<std::size_t>()};
    }
    m.frame_rate_hz = j.at("frame_rate_hz").get<double>();
    if (j.contains("norm_constant") && !j["norm_constant"].is_null()) {
      m.norm_constant = j["norm_constant"].get<double>();
    }
    m.magnitude_units = j.value("magnitude_units", std::string("arbitrary"));
  } catch (const json::exception &e) {
    fail(ErrorCode::format, path.string() + ": " + e.what());
  }
  require(!m.activities.empty(), ErrorCode::format, "manifest lists no activities");
  return m;
}

void write_manifest(const fs::path &dir, const DatasetManifest &manifest) {
  json j;
  j["activities"] = json::object();
  for (const auto &[a, s] : manifest.activities) {
    j["activities"][std::string(activity_name(a))] = {s.frames, s.subcarriers, s.antennas};
  }
  j["frame_rate_hz"] = manifest.frame_rate_hz;
  if (manifest.norm_constant) {
    j["norm_constant"] = *manifest.norm_constant;
  }
  j["magnitude_units"] = manifest.magnitude_units;
  std::ofstream out(dir / kManifestFile);
  require(static_cast<bool>(out), ErrorCode::io, "cannot write " + (dir / kManifestFile).string());
  out << j.dump(2) << '\n';
}

namespace {

void write_floats_le(std::ostream &out, std::span<const float> values) {
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char *>(values.data()), static_cast<std::streamsize>(values.size_bytes()));
  } else {
    for (float v : values) {
      auto bits = __builtin_bswap32(std::bit_cast<std::uint32_t>(v));
      out.write(reinterpret_cast<const char *>(&bits), sizeof bits);
    }
  }
}

std::vector<float> read_floats_le(const fs::path &path, std::size_t expected) {
  std::error_code ec;
  const auto bytes = fs::file_size(path, ec);
  if (ec) {
    fail(ErrorCode::format, "missing " + path.string());
  }
  if (bytes != expected * sizeof(float)) {
    std::ostringstream msg;
    msg << path.string() << " holds " << bytes << " bytes, manifest implies " << expected * sizeof(float);
    fail(ErrorCode::corruption, msg.str());
  }
  std::vector<float> values(expected);
  std::ifstream in(path, std::ios::binary);
  in.read(reinterpret_cast<char *>(values.data()), static_cast<std::streamsize>(bytes));
  require(static_cast<bool>(in), ErrorCode::io, "short read on " + path.string());
  if constexpr (std::endian::native != std::endian::little) {
    for (auto &v : values) {
      v = std::bit_cast<float>(__builtin_bswap32(std::bit_cast<std::uint32_t>(v)));
    }
  }
  return values;
}

} // namespace

void write_dataset(const fs::path &dir, std::span<const CsiRecording> recordings,
                   std::optional<double> norm_constant) {
  require(!recordings.empty(), ErrorCode::precondition, "no recordings to write");
  fs::create_directories(dir);
  DatasetManifest m;
  m.frame_rate_hz = recordings.front().frame_rate_hz();
  m.norm_constant = norm_constant;
  for (const auto &r : recordings) {
    m.activities[r.activity().activity] = r.shape();
    const fs::path path = dir / (std::string(r.activity().name()) + ".bin");
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), ErrorCode::io, "cannot write " + path.string());
    write_floats_le(out, r.values());
  }
  write_manifest(dir, m);
}

std::vector<CsiRecording> load_recordings(const fs::path &dir) {
  const DatasetManifest m = read_manifest(dir);
  for (const auto &entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".bin") {
      auto a = parse_activity(entry.path().stem().string());
      require(a.has_value() && m.activities.contains(*a), ErrorCode::format,
              entry.path().filename().string() + " is not listed in the manifest");
    }
  }
  std::vector<CsiRecording> out;
  for (const auto &[activity, shape] : m.activities) {
    const fs::path path = dir / (std::string(activity_name(activity)) + ".bin");
    out.emplace_back(shape, read_floats_le(path, shape.size()), m.frame_rate_hz, ActivityLabel{activity});
  }
  return out;
}

std::string dataset_hash(const fs::path &dir) {
  std::uint64_t h = 1469598103934665603ULL;
  auto feed = [&h](const fs::path &path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), ErrorCode::io, "cannot read " + path.string());
    char buf[1 << 16];
    while (in) {
      in.read(buf, sizeof buf);
      for (std::streamsize i = 0; i < in.gcount(); ++i) {
        h ^= static_cast<unsigned char>(buf[i]);
        h *= 1099511628211ULL;
      }
    }
  };
  const DatasetManifest m = read_manifest(dir);
  for (const auto &[activity, shape] : m.activities) {
    feed(dir / (std::string(activity_name(activity)) + ".bin"));
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

// ---------------------------------------------------------------------------
// Normalization and windowing

double compute_norm_constant(std::span<const CsiRecording> recordings) {
  require(!recordings.empty(), ErrorCode::precondition, "no recordings");
  double m = 0.0;
  for (const auto &r : recordings) {
    m = std::max(m, static_cast<double>(r.max_value()));
  }
  require(m > 0.0, ErrorCode::degenerate, "dataset is all zeros; cannot normalize");
  return m;
}

CsiRecording normalize(const CsiRecording &recording, double constant) {
  require(constant > 0.0 && std::isfinite(constant), ErrorCode::precondition,
          "normalization constant must be positive");
  require(!recording.normalized(), ErrorCode::idempotency, "recording is already normalized");
  CsiRecording out = recording;
  const double inv = 1.0 / constant;
  bool over = false;
  for (auto &v : out.values_) {
    v = static_cast<float>(static_cast<double>(v) * inv);
    over = over || v > 1.0F;
  }
  out.normalized_ = true;
  out.exceeds_unit_range_ = over;
  return out;
}

std::size_t window_frames(double frame_rate_hz, double window_seconds) {
  require(frame_rate_hz > 0.0 && window_seconds > 0.0, ErrorCode::precondition,
          "window length and frame rate must be positive");
  const double n = frame_rate_hz * window_seconds;
  const double rounded = std::round(n);
  require(std::abs(n - rounded) < 1e-6 && rounded >= 1.0, ErrorCode::precondition,
          "window must span a whole number of frames");
  return static_cast<std::size_t>(rounded);
}

std::size_t window_count(std::size_t frames, std::size_t win_frames, std::size_t stride) {
  require(win_frames >= 1 && stride >= 1, ErrorCode::precondition, "window and stride must be positive");
  require(win_frames <= frames, ErrorCode::range, "window longer than recording");
  return (frames - win_frames) / stride + 1;
}

CsiWindow extract_window(const CsiRecording &recording, std::size_t offset, std::size_t win_frames,
                         std::optional<std::size_t> antenna) {
  const Shape3 &s = recording.shape();
  require(offset + win_frames <= s.frames, ErrorCode::range, "window extends past the end of the recording");
  if (antenna) {
    require(*antenna < s.antennas, ErrorCode::range, "antenna index out of range");
  }
  CsiWindow w;
  w.frames = win_frames;
  w.subcarriers = s.subcarriers;
  w.channels = antenna ? 1 : s.antennas;
  w.label = recording.activity();
  w.source_offset = offset;
  const auto src = recording.values();
  const std::size_t row = s.subcarriers * s.antennas;
  if (!antenna) {
    w.values.assign(src.begin() + static_cast<std::ptrdiff_t>(offset * row),
                    src.begin() + static_cast<std::ptrdiff_t>((offset + win_frames) * row));
  } else {
    w.values.resize(win_frames * s.subcarriers);
    for (std::size_t f = 0; f < win_frames; ++f) {
      for (std::size_t k = 0; k < s.subcarriers; ++k) {
        w.values[f * s.subcarriers + k] = recording.at(offset + f, k, *antenna);
      }
    }
  }
  return w;
}

std::vector<CsiWindow> sliding_windows(const CsiRecording &recording, double window_seconds,
                                       std::size_t stride_frames, std::optional<std::size_t> antenna) {
  require(recording.normalized(), ErrorCode::precondition, "windows are cut from normalized recordings");
  const std::size_t win = window_frames(recording.frame_rate_hz(), window_seconds);
  const std::size_t n = window_count(recording.shape().frames, win, stride_frames);
  if (antenna) {
    require(*antenna < recording.shape().antennas, ErrorCode::range, "antenna index out of range");
  }
  std::vector<CsiWindow> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(extract_window(recording, i * stride_frames, win, antenna));
  }
  return out;
}

CsiWindow select_channel(const CsiWindow &window, std::size_t channel) {
  require(channel < window.channels, ErrorCode::range, "channel index out of range");
  CsiWindow w;
  w.frames = window.frames;
  w.subcarriers = window.subcarriers;
  w.channels = 1;
  w.label = window.label;
  w.source_offset = window.source_offset;
  const std::size_t n = window.frames * window.subcarriers;
  w.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    w.values[i] = window.values[i * window.channels + channel];
  }
  return w;
}

// ---------------------------------------------------------------------------
// Splitting

std::size_t test_count(std::size_t n, double test_fraction) {
  require(test_fraction > 0.0 && test_fraction < 1.0, ErrorCode::precondition, "test fraction must be in (0, 1)");
  require(n >= 2, ErrorCode::insufficient_data, "a class needs at least 2 windows to split");
  const auto t = static_cast<std::size_t>(std::llround(static_cast<double>(n) * test_fraction));
  return std::clamp<std::size_t>(t, 1, n - 1);
}

SplitIndices split_indices(std::size_t n, double test_fraction, SplitPolicy policy, std::uint64_t seed) {
  const std::size_t n_test = test_count(n, test_fraction);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  SplitIndices s;
  if (policy == SplitPolicy::random) {
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    s.test.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
    s.train.assign(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
    std::sort(s.test.begin(), s.test.end());
    std::sort(s.train.begin(), s.train.end());
  } else {
    s.train.assign(order.begin(), order.end() - static_cast<std::ptrdiff_t>(n_test));
    s.test.assign(order.end() - static_cast<std::ptrdiff_t>(n_test), order.end());
  }
  return s;
}

DatasetSplit split_dataset(std::span<const std::vector<CsiWindow>> per_class, double test_fraction,
                           SplitPolicy policy, std::uint64_t seed) {
  require(test_fraction > 0.0 && test_fraction < 1.0, ErrorCode::precondition, "test fraction must be in (0, 1)");
  DatasetSplit out;
  out.split_policy = policy;
  out.test_fraction = test_fraction;
  out.seed = seed;
  for (std::size_t c = 0; c < per_class.size(); ++c) {
    const auto &windows = per_class[c];
    const auto idx = split_indices(windows.size(), test_fraction, policy, seed + 0x9e3779b97f4a7c15ULL * c);
    for (auto i : idx.train) {
      out.train.push_back(windows[i]);
    }
    for (auto i : idx.test) {
      out.test.push_back(windows[i]);
    }
  }
  return out;
}

} // namespace wifisense
