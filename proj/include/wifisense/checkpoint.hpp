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
#include <string>
#include <vector>

#include <json.hpp>

namespace wifisense {

struct NamedArray {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<float> data;
};

/// Self-describing model archive: a JSON header plus named float32 arrays.
///
/// Layout (all integers little-endian):
///   bytes 0..7   magic "WSCKPT\0\0"
///   u32          format version (kCheckpointVersion)
///   u64          header length N
///   N bytes      UTF-8 JSON header; header["tensors"] lists name, shape,
///                offset and count of every array, offsets in floats
///   ...          concatenated IEEE-754 float32 payload
struct Archive {
  nlohmann::json meta = nlohmann::json::object();
  std::vector<NamedArray> arrays;

  [[nodiscard]] const NamedArray &array(const std::string &name) const;
  [[nodiscard]] bool has_array(const std::string &name) const;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

std::vector<std::uint8_t> serialize(const Archive &archive);
Archive deserialize(const std::vector<std::uint8_t> &bytes);

void write_archive(const std::string &path, const Archive &archive);
Archive read_archive(const std::string &path);

} // namespace wifisense
