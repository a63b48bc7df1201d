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

#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "beatforge/errors.hpp"

namespace beatforge::json_util {

/// `fields(cfg, visit)` calls visit("name", cfg.member) for each member.
/// Serialises every visited member into a JSON object.
template <typename Cfg, typename Fields>
void write_fields(nlohmann::json& j, const Cfg& cfg, Fields fields) {
  j = nlohmann::json::object();
  fields(cfg, [&](const char* key, const auto& value) { j[key] = value; });
}

/// Reads the members present in `j`, keeping defaults for the rest. Keys that
/// name no member are rejected so misspelt overrides fail loudly.
template <typename Cfg, typename Fields>
void read_fields(const nlohmann::json& j, Cfg& cfg, Fields fields, const char* what) {
  if (!j.is_object()) {
    throw Error(ErrorCode::kInvalidArgument, std::string(what) + " config must be an object");
  }
  std::set<std::string> known;
  fields(cfg, [&](const char* key, auto& value) {
    known.insert(key);
    auto it = j.find(key);
    if (it != j.end()) it->get_to(value);
  });
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (known.count(it.key()) == 0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "unknown " + std::string(what) + " field '" + it.key() + "'");
    }
  }
}

}  // namespace beatforge::json_util
