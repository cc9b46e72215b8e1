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

#ifndef INVBENCH_CLI_HPP_
#define INVBENCH_CLI_HPP_

#include <iosfwd>

namespace invbench {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

// Entry point of the `invbench` tool. Subcommands: sweep, trial, gradcheck,
// reproduce-fig2. Returns kExitOk, kExitValidation (usage, config or check
// failures) or kExitRuntime (I/O or solver failures).
int CliMain(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace invbench

#endif  // INVBENCH_CLI_HPP_
