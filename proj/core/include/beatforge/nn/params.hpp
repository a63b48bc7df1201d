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
#include <map>
#include <random>
#include <string>
#include <vector>

#include "beatforge/nn/tensor.hpp"

namespace beatforge::nn {

enum class Init {
  kZeros,
  kOnes,
  kUniformFanIn,  // U(-1/sqrt(fan_in), 1/sqrt(fan_in))
  kNormal02,      // N(0, 0.02)
};

struct Parameter {
  std::string name;
  Tensor tensor;
};

/// Ordered registry of a model's learnable tensors, keyed by hierarchical
/// name ("block0.spectral.attn.q.weight").
class ParamStore {
 public:
  explicit ParamStore(std::uint64_t seed = 0) : rng_(seed) {}

  Tensor create(const std::string& name, Shape shape, Init init, std::size_t fan_in = 1);

  const std::vector<Parameter>& parameters() const { return params_; }
  const Tensor& get(const std::string& name) const;
  bool contains(const std::string& name) const { return index_.count(name) > 0; }

  /// Sum of element counts over all parameters.
  std::size_t count() const;
  void zero_grad();
  /// Copies values (not gradients) from a store with identical names/shapes.
  void copy_values_from(const ParamStore& other);

 private:
  std::mt19937_64 rng_;
  std::vector<Parameter> params_;
  std::map<std::string, std::size_t> index_;
};

}  // namespace beatforge::nn
