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

#include "wifisense/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <functional>
#include <iterator>
#include <numeric>

#include "wifisense/error.hpp"

namespace wifisense {

namespace {

constexpr char kMagic[8] = {'W', 'S', 'C', 'K', 'P', 'T', '\0', '\0'};

template <typename T> void put_le(std::vector<std::uint8_t> &out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<std::uint8_t>((value >> (8 * i)) & 0xFF));
  }
}

template <typename T> T get_le(const std::vector<std::uint8_t> &in, std::size_t &pos) {
  require(pos + sizeof(T) <= in.size(), ErrorCode::corruption, "checkpoint truncated");
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(in[pos + i]) << (8 * i);
  }
  pos += sizeof(T);
  return value;
}

} // namespace

const NamedArray &Archive::array(const std::string &name) const {
  for (const auto &a : arrays) {
    if (a.name == name) {
      return a;
    }
  }
  fail(ErrorCode::format, "checkpoint has no array '" + name + "'");
}

bool Archive::has_array(const std::string &name) const {
  for (const auto &a : arrays) {
    if (a.name == name) {
      return true;
    }
  }
  return false;
}

std::vector<std::uint8_t> serialize(const Archive &archive) {
  nlohmann::json header = archive.meta;
  header["format"] = "wifisense-checkpoint";
  header["version"] = kCheckpointVersion;
  header["tensors"] = nlohmann::json::array();
  std::size_t offset = 0;
  for (const auto &a : archive.arrays) {
    header["tensors"].push_back({{"name", a.name}, {"shape", a.shape}, {"offset", offset}, {"count", a.data.size()}});
    offset += a.data.size();
  }
  const std::string text = header.dump();

  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::uint64_t>(out, text.size());
  out.insert(out.end(), text.begin(), text.end());
  out.reserve(out.size() + offset * 4);
  for (const auto &a : archive.arrays) {
    for (float f : a.data) {
      put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(f));
    }
  }
  return out;
}

Archive deserialize(const std::vector<std::uint8_t> &bytes) {
  require(bytes.size() >= sizeof kMagic && std::memcmp(bytes.data(), kMagic, sizeof kMagic) == 0, ErrorCode::format,
          "not a wifisense checkpoint");
  std::size_t pos = sizeof kMagic;
  const auto version = get_le<std::uint32_t>(bytes, pos);
  require(version == kCheckpointVersion, ErrorCode::format,
          "unsupported checkpoint version " + std::to_string(version));
  const auto header_len = get_le<std::uint64_t>(bytes, pos);
  require(pos + header_len <= bytes.size(), ErrorCode::corruption, "checkpoint header truncated");
  Archive archive;
  try {
    archive.meta = nlohmann::json::parse(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                                         bytes.begin() + static_cast<std::ptrdiff_t>(pos + header_len));
  } catch (const nlohmann::json::exception &e) {
    fail(ErrorCode::format, std::string("checkpoint header: ") + e.what());
  }
  pos += header_len;
  const std::size_t payload = pos;
  std::size_t total = 0;
  require(archive.meta.is_object() && archive.meta.contains("tensors") && archive.meta["tensors"].is_array(),
          ErrorCode::format, "checkpoint header has no tensor table");
  for (const auto &t : archive.meta.at("tensors")) {
    NamedArray a;
    std::size_t offset = 0;
    std::size_t count = 0;
    try {
      a.name = t.at("name").get<std::string>();
      a.shape = t.at("shape").get<std::vector<std::size_t>>();
      offset = t.at("offset").get<std::size_t>();
      count = t.at("count").get<std::size_t>();
    } catch (const nlohmann::json::exception &e) {
      fail(ErrorCode::format, std::string("checkpoint tensor entry: ") + e.what());
    }
    const std::size_t expected =
        std::accumulate(a.shape.begin(), a.shape.end(), std::size_t{1}, std::multiplies<>());
    require(expected == count, ErrorCode::corruption, "array '" + a.name + "' count disagrees with its shape");
    require(payload + (offset + count) * 4 <= bytes.size(), ErrorCode::corruption, "checkpoint payload truncated");
    a.data.resize(count);
    std::size_t p = payload + offset * 4;
    for (auto &f : a.data) {
      f = std::bit_cast<float>(get_le<std::uint32_t>(bytes, p));
    }
    total += count;
    archive.arrays.push_back(std::move(a));
  }
  require(payload + total * 4 == bytes.size(), ErrorCode::corruption, "checkpoint has trailing bytes");
  archive.meta.erase("tensors");
  archive.meta.erase("format");
  archive.meta.erase("version");
  return archive;
}

void write_archive(const std::string &path, const Archive &archive) {
  const auto bytes = serialize(archive);
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::io, "cannot write " + path);
  out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

Archive read_archive(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::io, "cannot read " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

} // namespace wifisense
