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
#include <string>

#include "beatforge/frontend.hpp"
#include "beatforge/nn/attention.hpp"
#include "beatforge/nn/conv.hpp"
#include "beatforge/nn/params.hpp"
#include "beatforge/nn/tensor.hpp"

namespace beatforge::nn {

/// Per-forward-pass state: dropout is active only when `training` is set and
/// an rng is supplied.
struct RunContext {
  bool training = false;
  std::mt19937_64* rng = nullptr;
};

Tensor apply_dropout(const Tensor& x, double p, const RunContext& ctx);

class Linear {
 public:
  Linear() = default;
  Linear(ParamStore& store, const std::string& name, std::size_t in, std::size_t out,
         bool bias = true);
  Tensor operator()(const Tensor& x) const;

  Tensor weight;  // [in x out]
  Tensor bias;    // [out]
};

class Conv1d {
 public:
  Conv1d() = default;
  Conv1d(ParamStore& store, const std::string& name, std::size_t in, std::size_t out,
         std::size_t kernel, std::size_t dilation = 1);
  Tensor operator()(const Tensor& x) const;

  Tensor weight;  // [out x in x K]
  Tensor bias;
  std::size_t dilation = 1;
};

class Conv2d {
 public:
  Conv2d() = default;
  Conv2d(ParamStore& store, const std::string& name, std::size_t in, std::size_t out,
         std::size_t kernel_f, std::size_t kernel_t, Conv2dGeometry geometry);
  Tensor operator()(const Tensor& x) const;

  Tensor weight;  // [out x in x KF x KT]
  Tensor bias;
  Conv2dGeometry geometry;
};

class LayerNorm {
 public:
  LayerNorm() = default;
  LayerNorm(ParamStore& store, const std::string& name, std::size_t dim);
  Tensor operator()(const Tensor& x) const;

  Tensor gamma;
  Tensor beta;
};

/// Channel normalisation over [C x ...] using the statistics of the current
/// example, in training and inference alike.
class BatchNorm {
 public:
  BatchNorm() = default;
  BatchNorm(ParamStore& store, const std::string& name, std::size_t channels);
  Tensor operator()(const Tensor& x) const;

  Tensor gamma;
  Tensor beta;
};

class MultiHeadAttention {
 public:
  MultiHeadAttention() = default;
  MultiHeadAttention(ParamStore& store, const std::string& name, std::size_t dim,
                     std::size_t heads);
  /// x: [B x L x dim]. Self-attention within each of the B sequences.
  Tensor operator()(const Tensor& x, AttentionProbs* capture = nullptr) const;

  std::size_t heads() const { return heads_; }

 private:
  Linear q_, k_, v_, o_;
  std::size_t heads_ = 1;
};

class FeedForward {
 public:
  FeedForward() = default;
  FeedForward(ParamStore& store, const std::string& name, std::size_t dim, std::size_t hidden,
              double dropout);
  Tensor operator()(const Tensor& x, const RunContext& ctx) const;

 private:
  Linear up_, down_;
  double dropout_ = 0.0;
};

/// Pre-norm encoder layer: x + attn(ln(x)), then x + ffn(ln(x)).
class TransformerEncoderLayer {
 public:
  TransformerEncoderLayer() = default;
  TransformerEncoderLayer(ParamStore& store, const std::string& name, std::size_t dim,
                          std::size_t heads, std::size_t ffn_hidden, double dropout);
  Tensor operator()(const Tensor& x, const RunContext& ctx,
                    AttentionProbs* capture = nullptr) const;

 private:
  LayerNorm ln_attn_, ln_ffn_;
  MultiHeadAttention attn_;
  FeedForward ffn_;
  double dropout_ = 0.0;
};

/// Pre-activation residual unit on [C x F x T]:
/// BN -> ReLU -> conv -> BN -> ReLU -> conv, plus skip. The first conv carries
/// the frequency stride; the skip is a strided 1x1 conv whenever the shape
/// changes.
class ResidualUnit {
 public:
  ResidualUnit() = default;
  ResidualUnit(ParamStore& store, const std::string& name, std::size_t in, std::size_t out,
               std::size_t kernel_f, std::size_t kernel_t, std::size_t stride_f);
  Tensor operator()(const Tensor& x) const;

  bool has_projection() const { return project_; }

 private:
  BatchNorm bn1_, bn2_;
  Conv2d conv1_, conv2_, skip_;
  bool project_ = false;
};

/// Filterbank as a parameter: [T x n_bins] magnitudes -> ln(1 + relu(S W)).
/// Initialised from the fixed triangular bank; trainable on request.
class HarmonicFilter {
 public:
  HarmonicFilter() = default;
  HarmonicFilter(ParamStore& store, const std::string& name, const Filterbank& bank,
                 bool trainable);
  Tensor operator()(const Tensor& magnitudes) const;

  Tensor weight;  // [n_bins x n_bands]
};

}  // namespace beatforge::nn
