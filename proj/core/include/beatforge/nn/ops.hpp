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
#include <random>
#include <span>
#include <vector>

#include "beatforge/nn/tensor.hpp"

namespace beatforge::nn {

// Elementwise arithmetic. Shapes must match exactly unless stated.
Tensor add(const Tensor& a, const Tensor& b);
/// a + b where b's shape equals the trailing dimensions of a (b is broadcast
/// over the leading ones).
Tensor add_trailing(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);
Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);

/// [M x K] * [K x N].
Tensor matmul(const Tensor& a, const Tensor& b);
/// Affine map over the last axis: x[... x in] * w[in x out] + b[out]. `b` may
/// be undefined.
Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b);

Tensor reshape(const Tensor& x, Shape shape);
Tensor permute(const Tensor& x, const std::vector<std::size_t>& axes);
Tensor concat(const std::vector<Tensor>& parts, std::size_t axis);
Tensor slice(const Tensor& x, std::size_t axis, std::size_t start, std::size_t length);
/// [d] -> [n x d].
Tensor repeat_rows(const Tensor& v, std::size_t n);

Tensor relu(const Tensor& x);
Tensor elu(const Tensor& x);
Tensor gelu(const Tensor& x);
Tensor sigmoid(const Tensor& x);
Tensor log1p(const Tensor& x);
/// Softmax over the last axis.
Tensor softmax(const Tensor& x);

/// Normalises over the last axis, then gamma * x + beta.
Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps = 1e-5);
/// Normalises each channel (axis 0) over all remaining positions of this
/// example, then applies the per-channel affine map.
Tensor batch_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps = 1e-5);

/// Inverted dropout; identity when p == 0.
Tensor dropout(const Tensor& x, double p, std::mt19937_64& rng);

/// mean(w * [softplus(z) - y * z]) over every element, i.e. the weighted
/// binary cross-entropy of sigmoid(z) against y. Logits are clamped to
/// [-30, 30] with a straight-through gradient.
Tensor weighted_bce_with_logits(const Tensor& logits, std::span<const double> labels,
                                std::span<const double> weights);

}  // namespace beatforge::nn
