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

#include <iosfwd>
#include <string>
#include <vector>

namespace wifisense {

inline constexpr const char *kToolVersion = "0.1.0";
inline constexpr const char *kDataRootEnv = "WIFISENSE_DATA_ROOT";

/// Exit status: 0 success, 1 runtime failure, 2 usage error.
int run_cli(int argc, const char *const *argv);
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace wifisense
