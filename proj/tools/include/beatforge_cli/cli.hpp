// Copyright 2026 The beatforge Authors.
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

#pragma once

#include <string>
#include <vector>

#include "beatforge/errors.hpp"

namespace beatforge::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitCheckpoint = 4;

/// Process exit status for a library error.
int exit_code_for(ErrorCode code);

/// Runs the command line `args` (args[0] is the program name) and returns
/// the exit status. Output goes to stdout, diagnostics to stderr.
int run(const std::vector<std::string>& args);

}  // namespace beatforge::cli
