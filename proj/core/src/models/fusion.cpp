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

#include "beatforge/models/fusion.hpp"

#include <cmath>

#include "beatforge/errors.hpp"
#include "beatforge/json_util.hpp"
#include "beatforge/nn/ops.hpp"

namespace beatforge::models {

namespace {

template <typename C, typename V>
void fusion_fields(C& c, V&& visit) {
  visit("spectnt", c.spectnt);
  visit("tcn", c.tcn);
  visit("front_blocks", c.front_blocks);
  visit("tail_blocks", c.tail_blocks);
  visit("chunk_seconds", c.chunk_seconds);
  visit("n_chunks", c.n_chunks);
  visit("input_seconds", c.input_seconds);
  visit("frame_rate", c.frame_rate);
  visit("enforce_duration", c.enforce_duration);
}

}  // namespace

void to_json(nlohmann::json& j, const FusionConfig& cfg) {
  json_util::write_fields(j, cfg, [](auto& c, auto&& v) { fusion_fields(c, v); });
}

void from_json(const nlohmann::json& j, FusionConfig& cfg) {
  json_util::read_fields(j, cfg, [](auto& c, auto&& v) { fusion_fields(c, v); }, "fusion");
}

void FusionConfig::validate() const {
  if (n_chunks == 0 || std::abs(chunk_seconds * static_cast<double>(n_chunks) - input_seconds) >
                           1e-9) {
    throw Error(ErrorCode::kInvalidArgument, "chunk_seconds * n_chunks must equal input_seconds");
  }
  if (front_blocks == 0 || tail_blocks == 0) {
    throw Error(ErrorCode::kInvalidArgument, "fusion needs front and tail blocks");
  }
  if (tcn.n_layers == 0 || tcn.channels == 0 || tcn.kernel_t % 2 == 0) {
    throw Error(ErrorCode::kInvalidArgument, "invalid tcn branch settings");
  }
  spectnt.validate();
}

FusionModel::FusionModel(const FusionConfig& cfg, std::uint64_t seed)
    : BeatModel(seed), cfg_(cfg) {
  cfg_.validate();
  const SpecTntConfig& s = cfg_.spectnt;
  embedding_ = SpecTntEmbedding(store_, "embed", s);
  for (std::size_t b = 0; b < cfg_.front_blocks; ++b) {
    front_.emplace_back(store_, "front" + std::to_string(b), s);
  }
  for (std::size_t b = 0; b < cfg_.tail_blocks; ++b) {
    tail_.emplace_back(store_, "tail" + std::to_string(b), s);
  }
  spectnt_head_ = nn::Linear(store_, "spectnt_head", s.temporal_dim, 3);
  tcn_in_ = nn::Linear(store_, "tcn.in", s.temporal_dim, cfg_.tcn.channels);
  tcn_ = TcnStack(store_, "tcn", cfg_.tcn.channels, cfg_.tcn.kernel_t, cfg_.tcn.n_layers,
                  cfg_.tcn.dropout);
  tcn_head_ = nn::Linear(store_, "tcn_head", cfg_.tcn.channels, 3);
}

std::pair<std::size_t, std::size_t> FusionModel::chunk_bounds(std::size_t frames,
                                                              std::size_t c) const {
  return {c * frames / cfg_.n_chunks, (c + 1) * frames / cfg_.n_chunks};
}

ModelOutput FusionModel::forward(const nn::Tensor& features, const nn::RunContext& ctx) const {
  if (features.rank() != 2 || features.dim(1) != cfg_.spectnt.n_bands) {
    throw Error(ErrorCode::kShapeMismatch, "fusion expects [T x " +
                                               std::to_string(cfg_.spectnt.n_bands) + "], got " +
                                               nn::shape_string(features.shape()));
  }
  const std::size_t frames = features.dim(0);
  if (cfg_.enforce_duration) check_duration(frames);
  if (frames < cfg_.n_chunks) throw Error(ErrorCode::kWrongDuration, "fewer frames than chunks");

  std::vector<SpecTntState> chunks;
  std::vector<nn::Tensor> front_fct;
  for (std::size_t c = 0; c < cfg_.n_chunks; ++c) {
    const auto [begin, end] = chunk_bounds(frames, c);
    SpecTntState state = embedding_(nn::slice(features, 0, begin, end - begin));
    for (const auto& block : front_) state = block(state, ctx);
    front_fct.push_back(state.fct);
    chunks.push_back(std::move(state));
  }

  nn::Tensor h = nn::permute(tcn_in_(nn::concat(front_fct, 0)), {1, 0});
  nn::Tensor tcn_logits = tcn_head_(nn::permute(tcn_(h, ctx), {1, 0}));

  std::vector<nn::Tensor> tail_fct;
  for (auto& state : chunks) {
    for (const auto& block : tail_) state = block(state, ctx);
    tail_fct.push_back(state.fct);
  }
  nn::Tensor spectnt_logits = spectnt_head_(nn::concat(tail_fct, 0));
  return {{spectnt_logits, tcn_logits}};
}

}  // namespace beatforge::models
