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

#include "beatforge/matrix.hpp"
#include "beatforge/models/model.hpp"
#include "beatforge/nn/attention.hpp"

namespace beatforge::models {

struct SpecTntConfig {
  std::size_t n_bands = 128;
  std::size_t n_blocks = 5;
  std::size_t spectral_dim = 64;
  std::size_t spectral_heads = 4;
  std::size_t temporal_dim = 256;
  std::size_t temporal_heads = 8;
  std::size_t frontend_channels = 256;
  std::size_t frontend_units = 3;
  std::size_t frontend_kernel_f = 3;
  std::size_t frontend_kernel_t = 1;
  std::size_t frontend_stride_f = 2;
  std::size_t spectral_ffn_multiplier = 4;
  std::size_t temporal_ffn_multiplier = 3;
  double dropout = 0.1;
  double input_seconds = 6.0;
  double frame_rate = 50.0;
  bool enforce_duration = true;

  /// Frequency positions after the residual front-end (128 -> 16 by default).
  std::size_t reduced_bands() const;
  void validate() const;
};

void to_json(nlohmann::json& j, const SpecTntConfig& cfg);
void from_json(const nlohmann::json& j, SpecTntConfig& cfg);

/// Residual front-end: [T x F] features -> [C x F' x T].
class ResNetFrontend {
 public:
  ResNetFrontend() = default;
  ResNetFrontend(nn::ParamStore& store, const std::string& name, const SpecTntConfig& cfg);
  nn::Tensor operator()(const nn::Tensor& features) const;

 private:
  std::vector<nn::ResidualUnit> units_;
};

/// Block state: spectral embeddings [T x F' x d_s] and one frequency-class
/// token per frame [T x d_t].
struct SpecTntState {
  nn::Tensor x;
  nn::Tensor fct;
};

/// Attention weights captured from one block.
struct BlockAttention {
  nn::AttentionProbs spectral;  // batch T, length F'+1
  nn::AttentionProbs temporal;  // batch 1, length T
};

class SpecTntBlock {
 public:
  SpecTntBlock() = default;
  SpecTntBlock(nn::ParamStore& store, const std::string& name, const SpecTntConfig& cfg);
  SpecTntState operator()(const SpecTntState& in, const nn::RunContext& ctx,
                          BlockAttention* capture = nullptr) const;

 private:
  nn::Linear fct_in_;         // d_t -> d_s, fills the token slot
  nn::Tensor freq_position_;  // [F'+1 x d_s]
  nn::TransformerEncoderLayer spectral_;
  nn::Linear fct_out_;  // d_s -> d_t
  nn::TransformerEncoderLayer temporal_;
  std::size_t temporal_dim_ = 0;
};

/// Front-end plus input projection: features -> initial block state.
class SpecTntEmbedding {
 public:
  SpecTntEmbedding() = default;
  SpecTntEmbedding(nn::ParamStore& store, const std::string& name, const SpecTntConfig& cfg);
  SpecTntState operator()(const nn::Tensor& features) const;

 private:
  ResNetFrontend resnet_;
  nn::Linear project_;  // C -> d_s per frequency position
  nn::Tensor fct_init_;  // [d_t]
};

enum class AttentionKind { kSpectral, kTemporal };

AttentionKind parse_attention_kind(const std::string& name);
std::string to_string(AttentionKind kind);

/// Selects one head of captured attention. Spectral: weights of each
/// frame's FCT query over its F'+1 keys, [T x (F'+1)]. Temporal: [T x T].
Matrix select_attention(const BlockAttention& attention, AttentionKind kind, std::size_t head);

class SpecTntModel : public BeatModel {
 public:
  explicit SpecTntModel(const SpecTntConfig& cfg, std::uint64_t seed = 0);

  Arch arch() const override { return Arch::kSpecTnt; }
  double input_seconds() const override { return cfg_.input_seconds; }
  double frame_rate() const override { return cfg_.frame_rate; }
  std::size_t n_bands() const override { return cfg_.n_bands; }
  nlohmann::json config_json() const override { return cfg_; }
  ModelOutput forward(const nn::Tensor& features, const nn::RunContext& ctx) const override;

  /// Attention map of one head of the last block (inference mode).
  Matrix export_attention(const nn::Tensor& features, AttentionKind kind,
                          std::size_t head) const;

  const SpecTntConfig& config() const { return cfg_; }

 private:
  ModelOutput run(const nn::Tensor& features, const nn::RunContext& ctx,
                  BlockAttention* last) const;

  SpecTntConfig cfg_;
  SpecTntEmbedding embedding_;
  std::vector<SpecTntBlock> blocks_;
  nn::Linear head_;
};

}  // namespace beatforge::models
