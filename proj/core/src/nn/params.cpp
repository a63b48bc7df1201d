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

#include "beatforge/nn/params.hpp"

#include <algorithm>
#include <cmath>

#include "beatforge/errors.hpp"

namespace beatforge::nn {

Tensor ParamStore::create(const std::string& name, Shape shape, Init init, std::size_t fan_in) {
  if (index_.count(name) > 0) {
    throw Error(ErrorCode::kInvalidArgument, "duplicate parameter name '" + name + "'");
  }
  Tensor t = Tensor::zeros(std::move(shape), true);
  auto values = t.data();
  switch (init) {
    case Init::kZeros:
      break;
    case Init::kOnes:
      std::fill(values.begin(), values.end(), 1.0);
      break;
    case Init::kUniformFanIn: {
      const double bound = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(fan_in, 1)));
      std::uniform_real_distribution<double> dist(-bound, bound);
      for (double& v : values) v = dist(rng_);
      break;
    }
    case Init::kNormal02: {
      std::normal_distribution<double> dist(0.0, 0.02);
      for (double& v : values) v = dist(rng_);
      break;
    }
  }
  index_[name] = params_.size();
  params_.push_back({name, t});
  return t;
}

const Tensor& ParamStore::get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw Error(ErrorCode::kInvalidArgument, "no parameter '" + name + "'");
  return params_[it->second].tensor;
}

std::size_t ParamStore::count() const {
  std::size_t total = 0;
  for (const auto& p : params_) total += p.tensor.numel();
  return total;
}

void ParamStore::zero_grad() {
  for (auto& p : params_) p.tensor.zero_grad();
}

void ParamStore::copy_values_from(const ParamStore& other) {
  if (other.params_.size() != params_.size()) {
    throw Error(ErrorCode::kShapeMismatch, "parameter stores differ in size");
  }
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const auto& src = other.params_[i];
    auto& dst = params_[i];
    if (src.name != dst.name || src.tensor.shape() != dst.tensor.shape()) {
      throw Error(ErrorCode::kShapeMismatch, "parameter mismatch at '" + dst.name + "'");
    }
    std::copy(src.tensor.data().begin(), src.tensor.data().end(), dst.tensor.data().begin());
  }
}

}  // namespace beatforge::nn
