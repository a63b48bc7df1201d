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

#include "beatforge/nn/layers.hpp"

#include <algorithm>

#include "beatforge/errors.hpp"
#include "beatforge/nn/ops.hpp"

namespace beatforge::nn {

Tensor apply_dropout(const Tensor& x, double p, const RunContext& ctx) {
  if (!ctx.training || ctx.rng == nullptr || p <= 0.0) return x;
  return dropout(x, p, *ctx.rng);
}

Linear::Linear(ParamStore& store, const std::string& name, std::size_t in, std::size_t out,
               bool with_bias) {
  weight = store.create(name + ".weight", {in, out}, Init::kUniformFanIn, in);
  if (with_bias) bias = store.create(name + ".bias", {out}, Init::kUniformFanIn, in);
}

Tensor Linear::operator()(const Tensor& x) const { return linear(x, weight, bias); }

Conv1d::Conv1d(ParamStore& store, const std::string& name, std::size_t in, std::size_t out,
               std::size_t kernel, std::size_t dil)
    : dilation(dil) {
  weight = store.create(name + ".weight", {out, in, kernel}, Init::kUniformFanIn, in * kernel);
  bias = store.create(name + ".bias", {out}, Init::kUniformFanIn, in * kernel);
}

Tensor Conv1d::operator()(const Tensor& x) const { return conv1d(x, weight, bias, dilation); }

Conv2d::Conv2d(ParamStore& store, const std::string& name, std::size_t in, std::size_t out,
               std::size_t kernel_f, std::size_t kernel_t, Conv2dGeometry geo)
    : geometry(geo) {
  const std::size_t fan_in = in * kernel_f * kernel_t;
  weight = store.create(name + ".weight", {out, in, kernel_f, kernel_t}, Init::kUniformFanIn,
                        fan_in);
  bias = store.create(name + ".bias", {out}, Init::kUniformFanIn, fan_in);
}

Tensor Conv2d::operator()(const Tensor& x) const { return conv2d(x, weight, bias, geometry); }

LayerNorm::LayerNorm(ParamStore& store, const std::string& name, std::size_t dim) {
  gamma = store.create(name + ".gamma", {dim}, Init::kOnes);
  beta = store.create(name + ".beta", {dim}, Init::kZeros);
}

Tensor LayerNorm::operator()(const Tensor& x) const { return layer_norm(x, gamma, beta); }

BatchNorm::BatchNorm(ParamStore& store, const std::string& name, std::size_t channels) {
  gamma = store.create(name + ".gamma", {channels}, Init::kOnes);
  beta = store.create(name + ".beta", {channels}, Init::kZeros);
}

Tensor BatchNorm::operator()(const Tensor& x) const { return batch_norm(x, gamma, beta); }

MultiHeadAttention::MultiHeadAttention(ParamStore& store, const std::string& name,
                                       std::size_t dim, std::size_t heads)
    : heads_(heads) {
  if (heads == 0 || dim % heads != 0) {
    throw Error(ErrorCode::kShapeMismatch, "attention dim " + std::to_string(dim) +
                                               " not divisible by " + std::to_string(heads) +
                                               " heads");
  }
  q_ = Linear(store, name + ".q", dim, dim);
  k_ = Linear(store, name + ".k", dim, dim);
  v_ = Linear(store, name + ".v", dim, dim);
  o_ = Linear(store, name + ".o", dim, dim);
}

Tensor MultiHeadAttention::operator()(const Tensor& x, AttentionProbs* capture) const {
  if (x.rank() != 3) throw Error(ErrorCode::kShapeMismatch, "attention expects [B x L x d]");
  Tensor mixed = scaled_dot_product_attention(q_(x), k_(x), v_(x), heads_, capture);
  return o_(mixed);
}

FeedForward::FeedForward(ParamStore& store, const std::string& name, std::size_t dim,
                         std::size_t hidden, double dropout)
    : up_(store, name + ".up", dim, hidden), down_(store, name + ".down", hidden, dim),
      dropout_(dropout) {}

Tensor FeedForward::operator()(const Tensor& x, const RunContext& ctx) const {
  return down_(apply_dropout(gelu(up_(x)), dropout_, ctx));
}

TransformerEncoderLayer::TransformerEncoderLayer(ParamStore& store, const std::string& name,
                                                 std::size_t dim, std::size_t heads,
                                                 std::size_t ffn_hidden, double dropout)
    : ln_attn_(store, name + ".ln_attn", dim),
      ln_ffn_(store, name + ".ln_ffn", dim),
      attn_(store, name + ".attn", dim, heads),
      ffn_(store, name + ".ffn", dim, ffn_hidden, dropout),
      dropout_(dropout) {}

Tensor TransformerEncoderLayer::operator()(const Tensor& x, const RunContext& ctx,
                                           AttentionProbs* capture) const {
  Tensor h = add(x, apply_dropout(attn_(ln_attn_(x), capture), dropout_, ctx));
  return add(h, apply_dropout(ffn_(ln_ffn_(h), ctx), dropout_, ctx));
}

ResidualUnit::ResidualUnit(ParamStore& store, const std::string& name, std::size_t in,
                           std::size_t out, std::size_t kernel_f, std::size_t kernel_t,
                           std::size_t stride_f) {
  if (kernel_f % 2 == 0 || kernel_t % 2 == 0) {
    throw Error(ErrorCode::kInvalidArgument, "residual unit kernels must be odd");
  }
  Conv2dGeometry first{stride_f, 1, kernel_f / 2, kernel_t / 2};
  Conv2dGeometry second{1, 1, kernel_f / 2, kernel_t / 2};
  bn1_ = BatchNorm(store, name + ".bn1", in);
  conv1_ = Conv2d(store, name + ".conv1", in, out, kernel_f, kernel_t, first);
  bn2_ = BatchNorm(store, name + ".bn2", out);
  conv2_ = Conv2d(store, name + ".conv2", out, out, kernel_f, kernel_t, second);
  project_ = in != out || stride_f != 1;
  if (project_) {
    skip_ = Conv2d(store, name + ".skip", in, out, 1, 1, Conv2dGeometry{stride_f, 1, 0, 0});
  }
}

Tensor ResidualUnit::operator()(const Tensor& x) const {
  Tensor h = conv1_(relu(bn1_(x)));
  h = conv2_(relu(bn2_(h)));
  return add(h, project_ ? skip_(x) : x);
}

HarmonicFilter::HarmonicFilter(ParamStore& store, const std::string& name, const Filterbank& bank,
                               bool trainable) {
  const Matrix& w = bank.weights();
  if (trainable) {
    weight = store.create(name + ".weight", {w.rows, w.cols}, Init::kZeros);
    std::copy(w.data.begin(), w.data.end(), weight.data().begin());
  } else {
    weight = Tensor::from({w.rows, w.cols}, w.data);
  }
}

Tensor HarmonicFilter::operator()(const Tensor& magnitudes) const {
  return log1p(relu(matmul(magnitudes, weight)));
}

}  // namespace beatforge::nn
