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

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "beatforge/dbn.hpp"
#include "beatforge/frontend.hpp"
#include "beatforge/metrics.hpp"
#include "beatforge/models/model.hpp"
#include "beatforge/training.hpp"

namespace beatforge {

void to_json(nlohmann::json& j, const FrontendConfig& cfg);
void from_json(const nlohmann::json& j, FrontendConfig& cfg);

/// Every tunable setting of a run. `model` holds the architecture-specific
/// config object; missing fields take the architecture defaults.
struct RunConfig {
  FrontendConfig frontend;
  nlohmann::json model = nlohmann::json::object();
  TrainConfig train;
  DbnConfig dbn;
  MetricConfig metrics;
};

nlohmann::json run_config_to_json(const RunConfig& cfg);
/// Sections may be omitted; unknown sections or fields are rejected.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

/// Applies "section.field[.sub]=value" to a config tree. The value is parsed
/// as JSON when possible (numbers, booleans, arrays) and kept as a string
/// otherwise.
void apply_override(nlohmann::json& tree, const std::string& assignment);

/// Copies the front-end band count and frame rate into the model section
/// unless it sets them itself.
nlohmann::json model_config_for(models::Arch arch, const nlohmann::json& model,
                                const FrontendConfig& frontend);

}  // namespace beatforge
