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

#include <functional>
#include <string_view>

namespace beatforge::log {

/// Reads BEATFORGE_LOG (trace|debug|info|warn|error|off) and applies it.
void init_from_env();

void debug(std::string_view message);
void info(std::string_view message);
void warn(std::string_view message);
void error(std::string_view message);

/// Receives every message at or above warn level in addition to the logger;
/// pass an empty function to detach.
using Observer = std::function<void(std::string_view level, std::string_view message)>;
void set_observer(Observer observer);

}  // namespace beatforge::log
