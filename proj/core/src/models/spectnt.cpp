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

#include "beatforge/models/spectnt.hpp"

#include "beatforge/errors.hpp"
#include "beatforge/json_util.hpp"
#include "beatforge/nn/ops.hpp"

namespace beatforge::models {

namespace {

template <typename C, typename V>
void spectnt_fields(C& c, V&& visit) {
  visit("n_bands", c.n_bands);
  visit("n_blocks", c.n_blocks);
  visit("spectral_dim", c.spectral_dim);
  visit("spectral_heads", c.spectral_heads);
  visit("temporal_dim", c.temporal_dim);
  visit("temporal_heads", c.temporal_heads);
  visit("frontend_channels", c.frontend_channels);
  visit("frontend_units", c.frontend_units);
  visit("frontend_kernel_f", c.frontend_kernel_f);
  visit("frontend_kernel_t", c.frontend_kernel_t);
  visit("frontend_stride_f", c.frontend_stride_f);
  visit("spectral_ffn_multiplier", c.spectral_ffn_multiplier);
  visit("temporal_ffn_multiplier", c.temporal_ffn_multiplier);
  visit("dropout", c.dropout);
  visit("input_seconds", c.input_seconds);
  visit("frame_rate", c.frame_rate);
  visit("enforce_duration", c.enforce_duration);
}

}  // namespace

void to_json(nlohmann::json& j, const SpecTntConfig& cfg) {
  json_util::write_fields(j, cfg, [](auto& c, auto&& v) { spectnt_fields(c, v); });
}

void from_json(const nlohmann::json& j, SpecTntConfig& cfg) {
  json_util::read_fields(j, cfg, [](auto& c, auto&& v) { spectnt_fields(c, v); }, "spectnt");
}

std::size_t SpecTntConfig::reduced_bands() const {
  std::size_t f = n_bands;
  const std::size_t pad = frontend_kernel_f / 2;
  for (std::size_t u = 0; u < frontend_units; ++u) {
    f = (f + 2 * pad - frontend_kernel_f) / frontend_stride_f + 1;
  }
  return f;
}

void SpecTntConfig::validate() const {
  if (n_blocks == 0 || frontend_units == 0) {
    throw Error(ErrorCode::kInvalidArgument, "spectnt needs at least one block and one unit");
  }
  if (spectral_heads == 0 || spectral_dim % spectral_heads != 0) {
    throw Error(ErrorCode::kInvalidArgument, "spectral_dim must be divisible by spectral_heads");
  }
  if (temporal_heads == 0 || temporal_dim % temporal_heads != 0) {
    throw Error(ErrorCode::kInvalidArgument, "temporal_dim must be divisible by temporal_heads");
  }
  if (frontend_kernel_f % 2 == 0 || frontend_kernel_t % 2 == 0 || frontend_stride_f == 0) {
    throw Error(ErrorCode::kInvalidArgument, "front-end kernels must be odd, stride positive");
  }
  if (n_bands < frontend_kernel_f) {
    throw Error(ErrorCode::kShapeMismatch, "too few bands for the front-end kernel");
  }
}

ResNetFrontend::ResNetFrontend(nn::ParamStore& store, const std::string& name,
                               const SpecTntConfig& cfg) {
  std::size_t in = 1;
  for (std::size_t u = 0; u < cfg.frontend_units; ++u) {
    units_.emplace_back(store, name + ".unit" + std::to_string(u), in, cfg.frontend_channels,
                        cfg.frontend_kernel_f, cfg.frontend_kernel_t, cfg.frontend_stride_f);
    in = cfg.frontend_channels;
  }
}

nn::Tensor ResNetFrontend::operator()(const nn::Tensor& features) const {
  const std::size_t frames = features.dim(0);
  const std::size_t bands = features.dim(1);
  nn::Tensor x = nn::reshape(nn::permute(features, {1, 0}), {1, bands, frames});
  for (const auto& unit : units_) x = unit(x);
  return x;
}

SpecTntBlock::SpecTntBlock(nn::ParamStore& store, const std::string& name,
                           const SpecTntConfig& cfg)
    : temporal_dim_(cfg.temporal_dim) {
  const std::size_t ds = cfg.spectral_dim;
  const std::size_t dt = cfg.temporal_dim;
  fct_in_ = nn::Linear(store, name + ".fct_in", dt, ds);
  freq_position_ =
      store.create(name + ".freq_position", {cfg.reduced_bands() + 1, ds}, nn::Init::kNormal02);
  spectral_ = nn::TransformerEncoderLayer(store, name + ".spectral", ds, cfg.spectral_heads,
                                          cfg.spectral_ffn_multiplier * ds, cfg.dropout);
  fct_out_ = nn::Linear(store, name + ".fct_out", ds, dt);
  temporal_ = nn::TransformerEncoderLayer(store, name + ".temporal", dt, cfg.temporal_heads,
                                          cfg.temporal_ffn_multiplier * dt, cfg.dropout);
}

SpecTntState SpecTntBlock::operator()(const SpecTntState& in, const nn::RunContext& ctx,
                                      BlockAttention* capture) const {
  const std::size_t frames = in.x.dim(0);
  const std::size_t bands = in.x.dim(1);
  const std::size_t ds = in.x.dim(2);
  if (in.fct.rank() != 2 || in.fct.dim(0) != frames || in.fct.dim(1) != temporal_dim_) {
    throw Error(ErrorCode::kShapeMismatch, "FCT sequence " + nn::shape_string(in.fct.shape()) +
                                               " does not match " + std::to_string(frames) +
                                               " frames");
  }
  if (bands + 1 != freq_position_.dim(0)) {
    throw Error(ErrorCode::kShapeMismatch, "block built for " +
                                               std::to_string(freq_position_.dim(0) - 1) +
                                               " frequency positions, got " +
                                               std::to_string(bands));
  }

  // Spectral encoder: each frame attends over [FCT, band_1 .. band_F'].
  nn::Tensor token = nn::reshape(fct_in_(in.fct), {frames, 1, ds});
  nn::Tensor z = nn::add_trailing(nn::concat({token, in.x}, 1), freq_position_);
  z = spectral_(z, ctx, capture != nullptr ? &capture->spectral : nullptr);
  nn::Tensor updated = nn::reshape(nn::slice(z, 1, 0, 1), {frames, ds});
  nn::Tensor x = nn::slice(z, 1, 1, bands);

  // Temporal encoder over the FCTs of all frames.
  nn::Tensor f = nn::add(fct_out_(updated), sinusoidal_encoding(frames, temporal_dim_));
  f = temporal_(nn::reshape(f, {1, frames, temporal_dim_}), ctx,
                capture != nullptr ? &capture->temporal : nullptr);
  return {x, nn::reshape(f, {frames, temporal_dim_})};
}

SpecTntEmbedding::SpecTntEmbedding(nn::ParamStore& store, const std::string& name,
                                   const SpecTntConfig& cfg)
    : resnet_(store, name + ".resnet", cfg),
      project_(store, name + ".project", cfg.frontend_channels, cfg.spectral_dim) {
  fct_init_ = store.create(name + ".fct_init", {cfg.temporal_dim}, nn::Init::kNormal02);
}

SpecTntState SpecTntEmbedding::operator()(const nn::Tensor& features) const {
  nn::Tensor h = nn::permute(resnet_(features), {2, 1, 0});  // [T x F' x C]
  return {project_(h), nn::repeat_rows(fct_init_, features.dim(0))};
}

AttentionKind parse_attention_kind(const std::string& name) {
  if (name == "spectral") return AttentionKind::kSpectral;
  if (name == "temporal") return AttentionKind::kTemporal;
  throw Error(ErrorCode::kInvalidArgument, "attention kind must be spectral or temporal");
}

std::string to_string(AttentionKind kind) {
  return kind == AttentionKind::kSpectral ? "spectral" : "temporal";
}

Matrix select_attention(const BlockAttention& attention, AttentionKind kind, std::size_t head) {
  const nn::AttentionProbs& p =
      kind == AttentionKind::kSpectral ? attention.spectral : attention.temporal;
  if (head >= p.heads) {
    throw Error(ErrorCode::kHeadOutOfRange, "head " + std::to_string(head) + " of " +
                                                std::to_string(p.heads) + " " + to_string(kind) +
                                                " heads");
  }
  if (kind == AttentionKind::kSpectral) {
    Matrix out(p.batch, p.length);
    for (std::size_t t = 0; t < p.batch; ++t) {
      for (std::size_t k = 0; k < p.length; ++k) out(t, k) = p.at(t, head, 0, k);
    }
    return out;
  }
  Matrix out(p.length, p.length);
  for (std::size_t q = 0; q < p.length; ++q) {
    for (std::size_t k = 0; k < p.length; ++k) out(q, k) = p.at(0, head, q, k);
  }
  return out;
}

SpecTntModel::SpecTntModel(const SpecTntConfig& cfg, std::uint64_t seed)
    : BeatModel(seed), cfg_(cfg) {
  cfg_.validate();
  embedding_ = SpecTntEmbedding(store_, "embed", cfg_);
  for (std::size_t b = 0; b < cfg_.n_blocks; ++b) {
    blocks_.emplace_back(store_, "block" + std::to_string(b), cfg_);
  }
  head_ = nn::Linear(store_, "head", cfg_.temporal_dim, 3);
}

ModelOutput SpecTntModel::run(const nn::Tensor& features, const nn::RunContext& ctx,
                              BlockAttention* last) const {
  if (features.rank() != 2 || features.dim(1) != cfg_.n_bands) {
    throw Error(ErrorCode::kShapeMismatch, "spectnt expects [T x " +
                                               std::to_string(cfg_.n_bands) + "], got " +
                                               nn::shape_string(features.shape()));
  }
  if (cfg_.enforce_duration) check_duration(features.dim(0));
  SpecTntState state = embedding_(features);
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    state = blocks_[b](state, ctx, b + 1 == blocks_.size() ? last : nullptr);
  }
  return {{head_(state.fct)}};
}

ModelOutput SpecTntModel::forward(const nn::Tensor& features, const nn::RunContext& ctx) const {
  return run(features, ctx, nullptr);
}

Matrix SpecTntModel::export_attention(const nn::Tensor& features, AttentionKind kind,
                                      std::size_t head) const {
  const std::size_t heads = kind == AttentionKind::kSpectral ? cfg_.spectral_heads
                                                             : cfg_.temporal_heads;
  if (head >= heads) {
    throw Error(ErrorCode::kHeadOutOfRange, "head " + std::to_string(head) + " of " +
                                                std::to_string(heads) + " " + to_string(kind) +
                                                " heads");
  }
  nn::NoGradGuard no_grad;
  BlockAttention attention;
  run(features, nn::RunContext{}, &attention);
  return select_attention(attention, kind, head);
}

}  // namespace beatforge::models
