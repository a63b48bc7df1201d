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

#include "beatforge/config.hpp"

#include <fstream>

#include "beatforge/errors.hpp"
#include "beatforge/json_util.hpp"

namespace beatforge {

namespace {

template <typename C, typename V>
void frontend_fields(C& c, V&& visit) {
  visit("sample_rate", c.sample_rate);
  visit("window_length", c.window_length);
  visit("base_hop", c.base_hop);
  visit("n_bands", c.n_bands);
  visit("fmin", c.fmin);
  visit("fmax", c.fmax);
  visit("hop_std", c.hop_std);
}

}  // namespace

void to_json(nlohmann::json& j, const FrontendConfig& cfg) {
  json_util::write_fields(j, cfg, [](auto& c, auto&& v) { frontend_fields(c, v); });
}

void from_json(const nlohmann::json& j, FrontendConfig& cfg) {
  json_util::read_fields(j, cfg, [](auto& c, auto&& v) { frontend_fields(c, v); }, "frontend");
}

nlohmann::json run_config_to_json(const RunConfig& cfg) {
  return {{"frontend", cfg.frontend},
          {"model", cfg.model},
          {"train", cfg.train},
          {"dbn", cfg.dbn},
          {"metrics", cfg.metrics}};
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  RunConfig cfg;
  json_util::read_fields(
      j, cfg,
      [](auto& c, auto&& visit) {
        visit("frontend", c.frontend);
        visit("model", c.model);
        visit("train", c.train);
        visit("dbn", c.dbn);
        visit("metrics", c.metrics);
      },
      "run");
  cfg.frontend.validate();
  cfg.train.validate();
  cfg.dbn.validate();
  cfg.metrics.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config " + path.string());
  try {
    return run_config_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, "bad config " + path.string() + ": " + e.what());
  }
}

void apply_override(nlohmann::json& tree, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw Error(ErrorCode::kInvalidArgument, "override must look like key=value: " + assignment);
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  nlohmann::json value;
  try {
    value = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception&) {
    value = text;
  }
  nlohmann::json* node = &tree;
  std::size_t begin = 0;
  while (true) {
    const auto dot = key.find('.', begin);
    const std::string part = key.substr(begin, dot == std::string::npos ? dot : dot - begin);
    if (part.empty()) throw Error(ErrorCode::kInvalidArgument, "empty key segment in " + key);
    if (!node->is_object()) *node = nlohmann::json::object();
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    begin = dot + 1;
  }
}

nlohmann::json model_config_for(models::Arch arch, const nlohmann::json& model,
                                const FrontendConfig& frontend) {
  nlohmann::json out = model.is_null() ? nlohmann::json::object() : model;
  nlohmann::json* target = &out;
  if (arch == models::Arch::kFusion) {
    if (!out.contains("frame_rate")) out["frame_rate"] = frontend.frame_rate();
    if (!out.contains("spectnt")) out["spectnt"] = nlohmann::json::object();
    target = &out["spectnt"];
  }
  if (!target->contains("n_bands")) (*target)["n_bands"] = frontend.n_bands;
  if (!target->contains("frame_rate")) (*target)["frame_rate"] = frontend.frame_rate();
  return out;
}

}  // namespace beatforge
