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
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "beatforge/frontend.hpp"
#include "beatforge/matrix.hpp"
#include "beatforge/nn/layers.hpp"
#include "beatforge/nn/params.hpp"
#include "beatforge/nn/tensor.hpp"

namespace beatforge::models {

enum class Arch { kTcn, kSpecTnt, kFusion };

std::string to_string(Arch arch);
/// Accepts "tcn", "spectnt", "fusion" (also "spectnt-tcn").
Arch parse_arch(const std::string& name);

/// Logits of every output head, each [T x 3] (beat, downbeat, non-beat).
/// Single-head models produce one entry; the fusion model produces the
/// SpecTNT branch followed by the TCN branch.
struct ModelOutput {
  std::vector<nn::Tensor> branch_logits;
};

/// Common interface of the three sequence models. Inputs are feature
/// matrices [T x n_bands] at the configured frame rate.
class BeatModel {
 public:
  virtual ~BeatModel() = default;

  virtual Arch arch() const = 0;
  virtual double input_seconds() const = 0;
  virtual double frame_rate() const = 0;
  virtual std::size_t n_bands() const = 0;
  virtual nlohmann::json config_json() const = 0;
  virtual ModelOutput forward(const nn::Tensor& features, const nn::RunContext& ctx) const = 0;

  /// Frames in one model input: round(input_seconds * frame_rate).
  std::size_t input_frames() const;

  nn::ParamStore& params() { return store_; }
  const nn::ParamStore& params() const { return store_; }
  std::size_t param_count() const { return store_.count(); }

 protected:
  explicit BeatModel(std::uint64_t seed) : store_(seed) {}
  /// Throws WrongDuration unless |frames - input_frames()| <= 1.
  void check_duration(std::size_t frames) const;

  nn::ParamStore store_;
};

/// Feature matrix as a constant tensor [T x n_bands].
nn::Tensor features_tensor(const Matrix& values);

/// Framewise sigmoid activations averaged over the model's heads: [T x 3].
/// A non-negative `branch` selects a single head instead.
Matrix activations(const ModelOutput& output, int branch = -1);

/// Builds a freshly initialised model from a config object (the "model"
/// section of a run config).
std::unique_ptr<BeatModel> make_model(Arch arch, const nlohmann::json& config,
                                      std::uint64_t seed);

/// Fixed sinusoidal encoding [length x dim].
nn::Tensor sinusoidal_encoding(std::size_t length, std::size_t dim);

}  // namespace beatforge::models
