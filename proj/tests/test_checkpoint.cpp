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

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <random>

#include "support.hpp"
#include "wifisense/checkpoint.hpp"

using namespace wifisense;

namespace {

Archive sample_archive() {
  Archive a;
  a.meta["kind"] = "test";
  a.meta["note"] = "μ and σ";
  a.arrays.push_back({"w", {2, 3}, {1.0F, -2.5F, 0.0F, 3.25F, 1e-30F, -0.0F}});
  a.arrays.push_back({"b", {1}, {std::numeric_limits<float>::max()}});
  return a;
}

std::uint64_t read_u64(const std::vector<std::uint8_t> &b, std::size_t pos) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) {
    v = (v << 8) | b[pos + static_cast<std::size_t>(i)];
  }
  return v;
}

} // namespace

TEST_SUITE("checkpoint") {

TEST_CASE("byte layout") {
  const auto bytes = serialize(sample_archive());
  REQUIRE(bytes.size() > 20);
  CHECK(std::memcmp(bytes.data(), "WSCKPT\0\0", 8) == 0);
  CHECK(bytes[8] == 1);
  CHECK(bytes[9] == 0);
  const auto header_len = read_u64(bytes, 12);
  CHECK(bytes.size() == 20 + header_len + 7 * 4);
  const auto header = nlohmann::json::parse(bytes.begin() + 20, bytes.begin() + 20 + static_cast<long>(header_len));
  CHECK(header.at("tensors").size() == 2);
  CHECK(header.at("tensors")[1].at("offset").get<std::size_t>() == 6);
  // 1.0f little-endian is 00 00 80 3f.
  const std::size_t payload = 20 + header_len;
  CHECK(bytes[payload + 0] == 0x00);
  CHECK(bytes[payload + 2] == 0x80);
  CHECK(bytes[payload + 3] == 0x3f);
}

TEST_CASE("round trip preserves values bit for bit") {
  const auto a = sample_archive();
  const auto back = deserialize(serialize(a));
  CHECK(back.meta == a.meta);
  REQUIRE(back.arrays.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back.arrays[i].name == a.arrays[i].name);
    CHECK(back.arrays[i].shape == a.arrays[i].shape);
    CHECK(std::memcmp(back.arrays[i].data.data(), a.arrays[i].data.data(), a.arrays[i].data.size() * 4) == 0);
  }
  CHECK(std::signbit(back.array("w").data[5]));
  CHECK(back.has_array("b"));
  CHECK_FALSE(back.has_array("c"));
  WS_CHECK_ERROR(back.array("c"), ErrorCode::format);
  CHECK(serialize(back) == serialize(a));
}

TEST_CASE("property: random archives round trip") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    Archive a;
    a.meta["trial"] = trial;
    const std::size_t n = rng() % 5;
    for (std::size_t i = 0; i < n; ++i) {
      NamedArray arr{"a" + std::to_string(i), {rng() % 4, rng() % 4 + 1}, {}};
      arr.data.resize(arr.shape[0] * arr.shape[1]);
      for (auto &f : arr.data) {
        f = std::bit_cast<float>(static_cast<std::uint32_t>(rng() & 0x7f7fffffULL));
      }
      a.arrays.push_back(arr);
    }
    const auto bytes = serialize(a);
    CHECK(serialize(deserialize(bytes)) == bytes);
  }
}

TEST_CASE("damaged archives are rejected") {
  const auto bytes = serialize(sample_archive());
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  WS_CHECK_ERROR(deserialize(bad_magic), ErrorCode::format);
  auto bad_version = bytes;
  bad_version[8] = 2;
  WS_CHECK_ERROR(deserialize(bad_version), ErrorCode::format);
  WS_CHECK_ERROR(deserialize(std::vector<std::uint8_t>(bytes.begin(), bytes.end() - 4)), ErrorCode::corruption);
  WS_CHECK_ERROR(deserialize(std::vector<std::uint8_t>(bytes.begin(), bytes.begin() + 14)), ErrorCode::corruption);
  auto trailing = bytes;
  trailing.push_back(0);
  WS_CHECK_ERROR(deserialize(trailing), ErrorCode::corruption);
  WS_CHECK_ERROR(deserialize(std::vector<std::uint8_t>{}), ErrorCode::format);

  auto bad_header = bytes;
  bad_header[20] = '!';
  WS_CHECK_ERROR(deserialize(bad_header), ErrorCode::format);

  Archive mismatched;
  mismatched.arrays.push_back({"w", {2, 2}, {1, 2, 3}});
  WS_CHECK_ERROR(deserialize(serialize(mismatched)), ErrorCode::corruption);
}

TEST_CASE("file round trip") {
  wstest::TempDir dir("ckpt");
  const auto path = (dir.path() / "m.ckpt").string();
  write_archive(path, sample_archive());
  CHECK(serialize(read_archive(path)) == serialize(sample_archive()));
  WS_CHECK_ERROR(read_archive((dir.path() / "missing.ckpt").string()), ErrorCode::io);
  WS_CHECK_ERROR(write_archive((dir.path() / "no" / "such" / "dir.ckpt").string(), sample_archive()), ErrorCode::io);
}

} // TEST_SUITE
