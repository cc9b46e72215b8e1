// Copyright 2026 The invbench Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef INVBENCH_CONFIG_IO_HPP_
#define INVBENCH_CONFIG_IO_HPP_

#include <filesystem>
#include <string>
#include <string_view>

#include "invbench/harness.hpp"

namespace invbench {

// Parses a JSON document whose keys mirror SweepConfig (nested objects
// `base`, `irm_hp`, `sgd_hp`). Absent keys keep their defaults; unknown keys
// and type errors throw Error(kInvalidConfig) naming the offending key. The
// result is validated.
SweepConfig ParseSweepConfig(std::string_view json_text);

// Reads and parses a config file; Error(kIoError) if it cannot be read.
SweepConfig LoadSweepConfig(const std::filesystem::path& path);

// Fully resolved config in the same schema, pretty-printed.
std::string SweepConfigToJson(const SweepConfig& cfg);

}  // namespace invbench

#endif  // INVBENCH_CONFIG_IO_HPP_
