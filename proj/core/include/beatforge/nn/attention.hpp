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
#include <vector>

#include "beatforge/nn/tensor.hpp"

namespace beatforge::nn {

/// Softmax attention weights kept for inspection: [batch x heads x L x L],
/// row-major.
struct AttentionProbs {
  std::size_t batch = 0;
  std::size_t heads = 0;
  std::size_t length = 0;
  std::vector<double> values;

  double at(std::size_t b, std::size_t h, std::size_t query, std::size_t key) const {
    return values[((b * heads + h) * length + query) * length + key];
  }
};

/// Per-head softmax(Q_h K_h^T / sqrt(d / heads)) V_h over already projected
/// q, k, v of shape [B x L x d]; heads are concatenated back to [B x L x d].
/// When `probs` is non-null the attention weights are copied into it.
Tensor scaled_dot_product_attention(const Tensor& q, const Tensor& k, const Tensor& v,
                                    std::size_t n_heads, AttentionProbs* probs = nullptr);

}  // namespace beatforge::nn
