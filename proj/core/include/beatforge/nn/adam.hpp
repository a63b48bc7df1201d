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

#include <cstdint>
#include <vector>

#include "beatforge/nn/params.hpp"

namespace beatforge::nn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  /// Decoupled decay: p -= lr * weight_decay * p before the Adam update.
  double weight_decay = 0.0;
};

class Adam {
 public:
  Adam(const ParamStore& store, AdamConfig cfg = {});

  /// Applies one update using the gradients currently held by `store`.
  /// Parameters without a gradient buffer are treated as having zero gradient.
  void step(ParamStore& store);

  std::uint64_t steps() const { return step_; }
  const AdamConfig& config() const { return cfg_; }
  void set_lr(double lr) { cfg_.lr = lr; }
  const std::vector<double>& first_moment(std::size_t param) const { return m_[param]; }
  const std::vector<double>& second_moment(std::size_t param) const { return v_[param]; }

 private:
  AdamConfig cfg_;
  std::uint64_t step_ = 0;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
};

}  // namespace beatforge::nn
