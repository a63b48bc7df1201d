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

#include <array>
#include <cstddef>
#include <vector>

#include <nlohmann/json.hpp>

#include "beatforge/models/model.hpp"

namespace beatforge::models {

struct TcnConfig {
  std::size_t n_bands = 128;
  std::size_t frontend_filters = 20;
  /// (frequency x time) kernel of each front-end conv. Frequency is valid,
  /// time is "same"-padded (odd sizes).
  std::vector<std::array<std::size_t, 2>> frontend_kernels = {{3, 3}, {13, 3}, {8, 3}};
  std::vector<std::size_t> pool_sizes = {3, 3, 3};
  std::size_t n_layers = 11;
  std::size_t channels = 20;
  std::size_t kernel_t = 5;
  double dropout = 0.1;
  double input_seconds = 24.0;
  double frame_rate = 50.0;
  bool enforce_duration = true;

  /// Band count after each conv and each pool, starting with n_bands:
  /// 128 -> 126 -> 42 -> 30 -> 10 -> 3 -> 1 by default.
  std::vector<std::size_t> frequency_chain() const;
  /// Throws unless the chain ends at exactly one band.
  void validate() const;
};

void to_json(nlohmann::json& j, const TcnConfig& cfg);
void from_json(const nlohmann::json& j, TcnConfig& cfg);

/// Three conv -> ELU -> frequency max-pool stages; [T x F] -> [C x T].
class TcnFrontend {
 public:
  TcnFrontend() = default;
  TcnFrontend(nn::ParamStore& store, const std::string& name, const TcnConfig& cfg);
  nn::Tensor operator()(const nn::Tensor& features, const nn::RunContext& ctx) const;

 private:
  std::vector<nn::Conv2d> convs_;
  std::vector<std::size_t> pools_;
  nn::Conv1d project_;
  bool has_project_ = false;
  double dropout_ = 0.0;
};

/// Layer i: two parallel dilated convs (dilations 2^i and 2^(i+1)), each
/// followed by ELU and dropout, concatenated, mixed back to C channels by a
/// 1x1 conv, plus a 1x1 residual path.
class TcnLayer {
 public:
  TcnLayer() = default;
  TcnLayer(nn::ParamStore& store, const std::string& name, std::size_t channels,
           std::size_t kernel, std::size_t index, double dropout);
  nn::Tensor operator()(const nn::Tensor& x, const nn::RunContext& ctx) const;

  /// Receptive-field growth of layer `index` in frames. The branches run in
  /// parallel, so the wider one dominates: (k - 1) * 2^(index+1).
  static std::size_t receptive_growth(std::size_t kernel, std::size_t index);

 private:
  nn::Conv1d branch_a_, branch_b_, mix_, residual_;
  double dropout_ = 0.0;
};

/// Stack of TcnLayers; [C x T] -> [C x T].
class TcnStack {
 public:
  TcnStack() = default;
  TcnStack(nn::ParamStore& store, const std::string& name, std::size_t channels,
           std::size_t kernel, std::size_t n_layers, double dropout);
  nn::Tensor operator()(const nn::Tensor& x, const nn::RunContext& ctx) const;
  /// Total receptive field in frames of the stack.
  std::size_t receptive_field() const;

 private:
  std::vector<TcnLayer> layers_;
  std::size_t kernel_ = 0;
};

class TcnModel : public BeatModel {
 public:
  explicit TcnModel(const TcnConfig& cfg, std::uint64_t seed = 0);

  Arch arch() const override { return Arch::kTcn; }
  double input_seconds() const override { return cfg_.input_seconds; }
  double frame_rate() const override { return cfg_.frame_rate; }
  std::size_t n_bands() const override { return cfg_.n_bands; }
  nlohmann::json config_json() const override { return cfg_; }
  ModelOutput forward(const nn::Tensor& features, const nn::RunContext& ctx) const override;

  const TcnConfig& config() const { return cfg_; }
  const TcnStack& stack() const { return stack_; }

 private:
  TcnConfig cfg_;
  TcnFrontend frontend_;
  TcnStack stack_;
  nn::Linear head_;
};

}  // namespace beatforge::models
