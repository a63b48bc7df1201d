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

#include "beatforge/nn/attention.hpp"

#include <cmath>

#include <Eigen/Core>

#include "beatforge/errors.hpp"

namespace beatforge::nn {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Strided = Eigen::OuterStride<>;
using HeadView = Eigen::Map<RowMat, 0, Strided>;
using ConstHeadView = Eigen::Map<const RowMat, 0, Strided>;
using MapMat = Eigen::Map<RowMat>;
using ConstMapMat = Eigen::Map<const RowMat>;

}  // namespace

Tensor scaled_dot_product_attention(const Tensor& q, const Tensor& k, const Tensor& v,
                                    std::size_t n_heads, AttentionProbs* probs) {
  if (q.rank() != 3 || q.shape() != k.shape() || q.shape() != v.shape()) {
    throw Error(ErrorCode::kShapeMismatch, "attention expects matching [B x L x d] inputs");
  }
  const std::size_t batch = q.dim(0);
  const std::size_t len = q.dim(1);
  const std::size_t d = q.dim(2);
  if (n_heads == 0 || d % n_heads != 0) {
    throw Error(ErrorCode::kShapeMismatch, "model width must be divisible by the head count");
  }
  const std::size_t dh = d / n_heads;
  const double inv_scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const auto L = static_cast<Eigen::Index>(len);
  const auto DH = static_cast<Eigen::Index>(dh);
  const Strided stride(static_cast<Eigen::Index>(d));

  std::vector<double> out(q.numel(), 0.0);
  std::vector<double> p_all(batch * n_heads * len * len);
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t h = 0; h < n_heads; ++h) {
      const std::size_t off = b * len * d + h * dh;
      ConstHeadView qh(q.data().data() + off, L, DH, stride);
      ConstHeadView kh(k.data().data() + off, L, DH, stride);
      ConstHeadView vh(v.data().data() + off, L, DH, stride);
      MapMat p(p_all.data() + (b * n_heads + h) * len * len, L, L);
      p.noalias() = (qh * kh.transpose()) * inv_scale;
      for (Eigen::Index r = 0; r < L; ++r) {
        const double peak = p.row(r).maxCoeff();
        p.row(r) = (p.row(r).array() - peak).exp();
        p.row(r) /= p.row(r).sum();
      }
      HeadView(out.data() + off, L, DH, stride).noalias() = p * vh;
    }
  }
  if (probs != nullptr) *probs = {batch, n_heads, len, p_all};

  return detail::make_result(
      q.shape(), std::move(out), {q, k, v},
      [=, p_all = std::move(p_all)](detail::Node& n) {
        std::vector<double> dp(len * len);
        const bool gq = n.parents[0]->requires_grad;
        const bool gk = n.parents[1]->requires_grad;
        const bool gv = n.parents[2]->requires_grad;
        double* dq = gq ? n.parents[0]->ensure_grad().data() : nullptr;
        double* dk = gk ? n.parents[1]->ensure_grad().data() : nullptr;
        double* dv = gv ? n.parents[2]->ensure_grad().data() : nullptr;
        for (std::size_t b = 0; b < batch; ++b) {
          for (std::size_t h = 0; h < n_heads; ++h) {
            const std::size_t off = b * len * d + h * dh;
            ConstHeadView qh(n.parents[0]->value.data() + off, L, DH, stride);
            ConstHeadView kh(n.parents[1]->value.data() + off, L, DH, stride);
            ConstHeadView vh(n.parents[2]->value.data() + off, L, DH, stride);
            ConstHeadView dout(n.grad.data() + off, L, DH, stride);
            ConstMapMat p(p_all.data() + (b * n_heads + h) * len * len, L, L);
            if (gv) HeadView(dv + off, L, DH, stride).noalias() += p.transpose() * dout;
            MapMat ds(dp.data(), L, L);
            ds.noalias() = dout * vh.transpose();
            for (Eigen::Index r = 0; r < L; ++r) {
              const double dot = ds.row(r).dot(p.row(r));
              ds.row(r) = p.row(r).array() * (ds.row(r).array() - dot);
            }
            ds *= inv_scale;
            if (gq) HeadView(dq + off, L, DH, stride).noalias() += ds * kh;
            if (gk) HeadView(dk + off, L, DH, stride).noalias() += ds.transpose() * qh;
          }
        }
      });
}

}  // namespace beatforge::nn
