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

#include "beatforge/models/tcn.hpp"

#include "beatforge/errors.hpp"
#include "beatforge/json_util.hpp"
#include "beatforge/nn/ops.hpp"

namespace beatforge::models {

namespace {

template <typename C, typename V>
void tcn_fields(C& c, V&& visit) {
  visit("n_bands", c.n_bands);
  visit("frontend_filters", c.frontend_filters);
  visit("frontend_kernels", c.frontend_kernels);
  visit("pool_sizes", c.pool_sizes);
  visit("n_layers", c.n_layers);
  visit("channels", c.channels);
  visit("kernel_t", c.kernel_t);
  visit("dropout", c.dropout);
  visit("input_seconds", c.input_seconds);
  visit("frame_rate", c.frame_rate);
  visit("enforce_duration", c.enforce_duration);
}

}  // namespace

void to_json(nlohmann::json& j, const TcnConfig& cfg) {
  json_util::write_fields(j, cfg, [](auto& c, auto&& v) { tcn_fields(c, v); });
}

void from_json(const nlohmann::json& j, TcnConfig& cfg) {
  json_util::read_fields(j, cfg, [](auto& c, auto&& v) { tcn_fields(c, v); }, "tcn");
}

std::vector<std::size_t> TcnConfig::frequency_chain() const {
  std::vector<std::size_t> chain{n_bands};
  std::size_t f = n_bands;
  for (std::size_t i = 0; i < frontend_kernels.size(); ++i) {
    const std::size_t kf = frontend_kernels[i][0];
    if (kf > f) {
      throw Error(ErrorCode::kShapeMismatch, "front-end kernel " + std::to_string(kf) +
                                                 " exceeds " + std::to_string(f) + " bands");
    }
    f = f - kf + 1;
    chain.push_back(f);
    const std::size_t pool = i < pool_sizes.size() ? pool_sizes[i] : 1;
    f = (f + pool - 1) / pool;
    chain.push_back(f);
  }
  return chain;
}

void TcnConfig::validate() const {
  if (n_layers == 0 || channels == 0 || frontend_filters == 0) {
    throw Error(ErrorCode::kInvalidArgument, "tcn needs n_layers, channels and filters > 0");
  }
  if (frontend_kernels.empty() || pool_sizes.size() != frontend_kernels.size()) {
    throw Error(ErrorCode::kInvalidArgument, "tcn needs one pool size per front-end kernel");
  }
  for (const auto& k : frontend_kernels) {
    if (k[0] == 0 || k[1] % 2 == 0) {
      throw Error(ErrorCode::kInvalidArgument, "front-end time kernels must be odd");
    }
  }
  if (kernel_t % 2 == 0) throw Error(ErrorCode::kInvalidArgument, "kernel_t must be odd");
  if (frequency_chain().back() != 1) {
    throw Error(ErrorCode::kShapeMismatch,
                "front-end leaves " + std::to_string(frequency_chain().back()) +
                    " bands; kernels and pools must reduce " + std::to_string(n_bands) + " to 1");
  }
}

TcnFrontend::TcnFrontend(nn::ParamStore& store, const std::string& name, const TcnConfig& cfg)
    : pools_(cfg.pool_sizes), dropout_(cfg.dropout) {
  std::size_t in = 1;
  for (std::size_t i = 0; i < cfg.frontend_kernels.size(); ++i) {
    const auto [kf, kt] = cfg.frontend_kernels[i];
    convs_.emplace_back(store, name + ".conv" + std::to_string(i), in, cfg.frontend_filters, kf,
                        kt, nn::Conv2dGeometry{1, 1, 0, kt / 2});
    in = cfg.frontend_filters;
  }
  has_project_ = cfg.frontend_filters != cfg.channels;
  if (has_project_) {
    project_ = nn::Conv1d(store, name + ".project", cfg.frontend_filters, cfg.channels, 1);
  }
}

nn::Tensor TcnFrontend::operator()(const nn::Tensor& features, const nn::RunContext& ctx) const {
  const std::size_t frames = features.dim(0);
  const std::size_t bands = features.dim(1);
  nn::Tensor x = nn::reshape(nn::permute(features, {1, 0}), {1, bands, frames});
  for (std::size_t i = 0; i < convs_.size(); ++i) {
    x = nn::max_pool_freq(nn::elu(convs_[i](x)), pools_[i]);
    x = nn::apply_dropout(x, dropout_, ctx);
  }
  if (x.dim(1) != 1) {
    throw Error(ErrorCode::kShapeMismatch, "front-end output has " + std::to_string(x.dim(1)) +
                                               " bands, expected 1");
  }
  x = nn::reshape(x, {x.dim(0), frames});
  return has_project_ ? project_(x) : x;
}

TcnLayer::TcnLayer(nn::ParamStore& store, const std::string& name, std::size_t channels,
                   std::size_t kernel, std::size_t index, double dropout)
    : dropout_(dropout) {
  const std::size_t dilation = std::size_t{1} << index;
  branch_a_ = nn::Conv1d(store, name + ".dil_a", channels, channels, kernel, dilation);
  branch_b_ = nn::Conv1d(store, name + ".dil_b", channels, channels, kernel, 2 * dilation);
  mix_ = nn::Conv1d(store, name + ".mix", 2 * channels, channels, 1);
  residual_ = nn::Conv1d(store, name + ".residual", channels, channels, 1);
}

nn::Tensor TcnLayer::operator()(const nn::Tensor& x, const nn::RunContext& ctx) const {
  nn::Tensor a = nn::apply_dropout(nn::elu(branch_a_(x)), dropout_, ctx);
  nn::Tensor b = nn::apply_dropout(nn::elu(branch_b_(x)), dropout_, ctx);
  return nn::add(mix_(nn::concat({a, b}, 0)), residual_(x));
}

std::size_t TcnLayer::receptive_growth(std::size_t kernel, std::size_t index) {
  return (kernel - 1) * (std::size_t{1} << (index + 1));
}

TcnStack::TcnStack(nn::ParamStore& store, const std::string& name, std::size_t channels,
                   std::size_t kernel, std::size_t n_layers, double dropout)
    : kernel_(kernel) {
  for (std::size_t i = 0; i < n_layers; ++i) {
    layers_.emplace_back(store, name + ".layer" + std::to_string(i), channels, kernel, i,
                         dropout);
  }
}

nn::Tensor TcnStack::operator()(const nn::Tensor& x, const nn::RunContext& ctx) const {
  nn::Tensor h = x;
  for (const auto& layer : layers_) h = layer(h, ctx);
  return h;
}

std::size_t TcnStack::receptive_field() const {
  std::size_t rf = 1;
  for (std::size_t i = 0; i < layers_.size(); ++i) rf += TcnLayer::receptive_growth(kernel_, i);
  return rf;
}

TcnModel::TcnModel(const TcnConfig& cfg, std::uint64_t seed) : BeatModel(seed), cfg_(cfg) {
  cfg_.validate();
  frontend_ = TcnFrontend(store_, "frontend", cfg_);
  stack_ = TcnStack(store_, "tcn", cfg_.channels, cfg_.kernel_t, cfg_.n_layers, cfg_.dropout);
  head_ = nn::Linear(store_, "head", cfg_.channels, 3);
}

ModelOutput TcnModel::forward(const nn::Tensor& features, const nn::RunContext& ctx) const {
  if (features.rank() != 2 || features.dim(1) != cfg_.n_bands) {
    throw Error(ErrorCode::kShapeMismatch, "tcn expects [T x " + std::to_string(cfg_.n_bands) +
                                               "], got " + nn::shape_string(features.shape()));
  }
  if (cfg_.enforce_duration) check_duration(features.dim(0));
  nn::Tensor h = stack_(frontend_(features, ctx), ctx);
  return {{head_(nn::permute(h, {1, 0}))}};
}

}  // namespace beatforge::models
