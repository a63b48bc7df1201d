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

#include <nlohmann/json.hpp>

#include "beatforge/nn/params.hpp"

namespace beatforge::nn {

/// Checkpoint = JSON index at `path` plus a float32 blob next to it
/// (`path` + ".bin"). The index holds {format, arch, config, blob,
/// params: [{name, shape, offset}]}, offsets in bytes.
struct CheckpointHeader {
  std::string arch;
  nlohmann::json config;
  nlohmann::json index;
};

void save_checkpoint(const std::filesystem::path& path, const ParamStore& store,
                     const std::string& arch, const nlohmann::json& config);

CheckpointHeader read_checkpoint_header(const std::filesystem::path& path);

/// Loads parameter values into `store`; every parameter of the store must be
/// present in the checkpoint with the same shape.
void load_checkpoint_params(const std::filesystem::path& path, ParamStore& store);

}  // namespace beatforge::nn
