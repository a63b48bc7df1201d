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

#include "beatforge/nn/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <span>
#include <vector>

#include "beatforge/errors.hpp"
#include "beatforge/matrix.hpp"

namespace beatforge::nn {

namespace {

constexpr const char* kFormat = "beatforge-checkpoint-1";

std::filesystem::path blob_path(const std::filesystem::path& path) {
  return std::filesystem::path(path.string() + ".bin");
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const ParamStore& store,
                     const std::string& arch, const nlohmann::json& config) {
  std::vector<char> blob;
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& p : store.parameters()) {
    entries.push_back({{"name", p.name}, {"shape", p.tensor.shape()}, {"offset", blob.size()}});
    for (double v : p.tensor.data()) {
      const float f = static_cast<float>(v);
      char bytes[sizeof(float)];
      std::memcpy(bytes, &f, sizeof(float));
      blob.insert(blob.end(), bytes, bytes + sizeof(float));
    }
  }
  const auto bin = blob_path(path);
  nlohmann::json index = {{"format", kFormat},
                          {"arch", arch},
                          {"config", config},
                          {"blob", bin.filename().string()},
                          {"params", entries}};
  try {
    write_file_atomic(bin, blob);
    const std::string text = index.dump(2) + "\n";
    write_file_atomic(path, std::span<const char>(text.data(), text.size()));
  } catch (const Error& e) {
    throw Error(ErrorCode::kCheckpoint, e.what());
  }
}

CheckpointHeader read_checkpoint_header(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kCheckpoint, "cannot open checkpoint " + path.string());
  nlohmann::json index;
  try {
    in >> index;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCheckpoint, "malformed checkpoint index: " + std::string(e.what()));
  }
  if (!index.is_object() || index.value("format", "") != kFormat || !index.contains("params")) {
    throw Error(ErrorCode::kCheckpoint, "not a beatforge checkpoint: " + path.string());
  }
  return {index.value("arch", ""), index.value("config", nlohmann::json::object()), index};
}

void load_checkpoint_params(const std::filesystem::path& path, ParamStore& store) {
  const CheckpointHeader header = read_checkpoint_header(path);
  const auto bin = path.parent_path() / header.index.value("blob", "");
  std::ifstream in(bin, std::ios::binary);
  if (!in) throw Error(ErrorCode::kCheckpoint, "cannot open checkpoint blob " + bin.string());
  const std::vector<char> blob((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());

  std::map<std::string, nlohmann::json> entries;
  for (const auto& e : header.index["params"]) entries[e.at("name").get<std::string>()] = e;

  for (const auto& p : store.parameters()) {
    auto it = entries.find(p.name);
    if (it == entries.end()) {
      throw Error(ErrorCode::kCheckpoint, "checkpoint lacks parameter '" + p.name + "'");
    }
    const auto shape = it->second.at("shape").get<Shape>();
    if (shape != p.tensor.shape()) {
      throw Error(ErrorCode::kCheckpoint, "shape mismatch for '" + p.name + "': " +
                                              shape_string(shape) + " vs " +
                                              shape_string(p.tensor.shape()));
    }
    const auto offset = it->second.at("offset").get<std::size_t>();
    const std::size_t n = p.tensor.numel();
    if (offset + n * sizeof(float) > blob.size()) {
      throw Error(ErrorCode::kCheckpoint, "checkpoint blob truncated at '" + p.name + "'");
    }
    Tensor t = p.tensor;
    auto values = t.data();
    for (std::size_t i = 0; i < n; ++i) {
      float f;
      std::memcpy(&f, blob.data() + offset + i * sizeof(float), sizeof(float));
      values[i] = static_cast<double>(f);
    }
  }
}

}  // namespace beatforge::nn
