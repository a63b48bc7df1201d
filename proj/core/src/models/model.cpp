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

#include "beatforge/models/model.hpp"

#include <cmath>

#include "beatforge/errors.hpp"
#include "beatforge/models/fusion.hpp"
#include "beatforge/models/spectnt.hpp"
#include "beatforge/models/tcn.hpp"

namespace beatforge::models {

std::string to_string(Arch arch) {
  switch (arch) {
    case Arch::kTcn: return "tcn";
    case Arch::kSpecTnt: return "spectnt";
    case Arch::kFusion: return "fusion";
  }
  return "unknown";
}

Arch parse_arch(const std::string& name) {
  if (name == "tcn") return Arch::kTcn;
  if (name == "spectnt") return Arch::kSpecTnt;
  if (name == "fusion" || name == "spectnt-tcn") return Arch::kFusion;
  throw Error(ErrorCode::kInvalidArgument, "unknown arch '" + name + "'");
}

std::size_t BeatModel::input_frames() const {
  return static_cast<std::size_t>(std::lround(input_seconds() * frame_rate()));
}

void BeatModel::check_duration(std::size_t frames) const {
  const std::size_t expected = input_frames();
  const std::size_t diff = frames > expected ? frames - expected : expected - frames;
  if (diff > 1) {
    throw Error(ErrorCode::kWrongDuration, to_string(arch()) + " expects " +
                                               std::to_string(expected) + " frames, got " +
                                               std::to_string(frames));
  }
}

nn::Tensor features_tensor(const Matrix& values) {
  return nn::Tensor::from({values.rows, values.cols}, values.data);
}

Matrix activations(const ModelOutput& output, int branch) {
  if (output.branch_logits.empty()) throw Error(ErrorCode::kInvalidArgument, "no model heads");
  if (branch >= static_cast<int>(output.branch_logits.size())) {
    throw Error(ErrorCode::kInvalidArgument, "model has no head " + std::to_string(branch));
  }
  std::vector<nn::Tensor> heads = output.branch_logits;
  if (branch >= 0) heads = {output.branch_logits[static_cast<std::size_t>(branch)]};
  const nn::Tensor& first = heads.front();
  Matrix out(first.dim(0), first.dim(1));
  const double share = 1.0 / static_cast<double>(heads.size());
  for (const auto& logits : heads) {
    if (logits.shape() != first.shape()) {
      throw Error(ErrorCode::kShapeMismatch, "branch outputs differ in shape");
    }
    auto z = logits.data();
    for (std::size_t i = 0; i < z.size(); ++i) out.data[i] += share / (1.0 + std::exp(-z[i]));
  }
  return out;
}

std::unique_ptr<BeatModel> make_model(Arch arch, const nlohmann::json& config,
                                      std::uint64_t seed) {
  const nlohmann::json& cfg = config.is_null() ? nlohmann::json::object() : config;
  try {
    switch (arch) {
      case Arch::kTcn: return std::make_unique<TcnModel>(cfg.get<TcnConfig>(), seed);
      case Arch::kSpecTnt: return std::make_unique<SpecTntModel>(cfg.get<SpecTntConfig>(), seed);
      case Arch::kFusion: return std::make_unique<FusionModel>(cfg.get<FusionConfig>(), seed);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, "bad model config: " + std::string(e.what()));
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown arch");
}

nn::Tensor sinusoidal_encoding(std::size_t length, std::size_t dim) {
  std::vector<double> pe(length * dim);
  for (std::size_t t = 0; t < length; ++t) {
    for (std::size_t i = 0; i < dim; ++i) {
      const double rate = std::pow(10000.0, -static_cast<double>(2 * (i / 2)) / dim);
      const double angle = static_cast<double>(t) * rate;
      pe[t * dim + i] = (i % 2 == 0) ? std::sin(angle) : std::cos(angle);
    }
  }
  return nn::Tensor::from({length, dim}, std::move(pe));
}

}  // namespace beatforge::models
