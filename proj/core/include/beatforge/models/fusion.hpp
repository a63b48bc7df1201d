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

#include <cstddef>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "beatforge/models/model.hpp"
#include "beatforge/models/spectnt.hpp"
#include "beatforge/models/tcn.hpp"

namespace beatforge::models {

/// The SpecTNT part uses everything except n_blocks and input_seconds; the
/// TCN part uses n_layers, channels, kernel_t and dropout.
struct FusionConfig {
  SpecTntConfig spectnt;
  TcnConfig tcn;
  std::size_t front_blocks = 2;
  std::size_t tail_blocks = 3;
  double chunk_seconds = 6.0;
  std::size_t n_chunks = 4;
  double input_seconds = 24.0;
  double frame_rate = 50.0;
  bool enforce_duration = true;

  void validate() const;
};

void to_json(nlohmann::json& j, const FusionConfig& cfg);
void from_json(const nlohmann::json& j, FusionConfig& cfg);

/// Shared SpecTNT front blocks run per chunk, then two branches: SpecTNT
/// tail blocks (per chunk) and a TCN over the re-joined FCT sequence.
/// Output order: {spectnt branch, tcn branch}.
class FusionModel : public BeatModel {
 public:
  explicit FusionModel(const FusionConfig& cfg, std::uint64_t seed = 0);

  Arch arch() const override { return Arch::kFusion; }
  double input_seconds() const override { return cfg_.input_seconds; }
  double frame_rate() const override { return cfg_.frame_rate; }
  std::size_t n_bands() const override { return cfg_.spectnt.n_bands; }
  nlohmann::json config_json() const override { return cfg_; }
  ModelOutput forward(const nn::Tensor& features, const nn::RunContext& ctx) const override;

  /// Frame range [begin, end) of chunk c for a T-frame input.
  std::pair<std::size_t, std::size_t> chunk_bounds(std::size_t frames, std::size_t c) const;

  const FusionConfig& config() const { return cfg_; }

 private:
  FusionConfig cfg_;
  SpecTntEmbedding embedding_;
  std::vector<SpecTntBlock> front_;
  std::vector<SpecTntBlock> tail_;
  nn::Linear spectnt_head_;
  nn::Linear tcn_in_;
  TcnStack tcn_;
  nn::Linear tcn_head_;
};

}  // namespace beatforge::models
