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

#include "beatforge/nn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Core>

#include "beatforge/errors.hpp"

namespace beatforge::nn {

using detail::make_result;
using detail::Node;

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using ConstMapMat = Eigen::Map<const RowMat>;

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw Error(ErrorCode::kShapeMismatch, std::string(op) + ": " + shape_string(a.shape()) +
                                               " vs " + shape_string(b.shape()));
  }
}

bool wants_grad(const Node& n, std::size_t i) { return n.parents[i]->requires_grad; }

std::vector<double>& parent_grad(Node& n, std::size_t i) { return n.parents[i]->ensure_grad(); }

/// Elementwise unary op. `deriv(x, y)` returns dy/dx.
template <typename F, typename D>
Tensor unary(const Tensor& x, F f, D deriv) {
  std::vector<double> out(x.numel());
  const auto in = x.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(in[i]);
  return make_result(x.shape(), std::move(out), {x}, [deriv](Node& n) {
    auto& g = parent_grad(n, 0);
    const auto& xv = n.parents[0]->value;
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += n.grad[i] * deriv(xv[i], n.value[i]);
  });
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] + b.data()[i];
  return make_result(a.shape(), std::move(out), {a, b}, [](Node& n) {
    for (std::size_t p = 0; p < 2; ++p) {
      if (!wants_grad(n, p)) continue;
      auto& g = parent_grad(n, p);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += n.grad[i];
    }
  });
}

Tensor add_trailing(const Tensor& a, const Tensor& b) {
  const auto& sa = a.shape();
  const auto& sb = b.shape();
  if (sb.size() > sa.size() || !std::equal(sb.rbegin(), sb.rend(), sa.rbegin())) {
    throw Error(ErrorCode::kShapeMismatch,
                "add_trailing: " + shape_string(sb) + " is not a suffix of " + shape_string(sa));
  }
  const std::size_t inner = b.numel();
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] + b.data()[i % inner];
  return make_result(sa, std::move(out), {a, b}, [inner](Node& n) {
    if (wants_grad(n, 0)) {
      auto& g = parent_grad(n, 0);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += n.grad[i];
    }
    if (wants_grad(n, 1)) {
      auto& g = parent_grad(n, 1);
      for (std::size_t i = 0; i < n.grad.size(); ++i) g[i % inner] += n.grad[i];
    }
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * b.data()[i];
  return make_result(a.shape(), std::move(out), {a, b}, [](Node& n) {
    const auto& av = n.parents[0]->value;
    const auto& bv = n.parents[1]->value;
    if (wants_grad(n, 0)) {
      auto& g = parent_grad(n, 0);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += n.grad[i] * bv[i];
    }
    if (wants_grad(n, 1)) {
      auto& g = parent_grad(n, 1);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += n.grad[i] * av[i];
    }
  });
}

Tensor scale(const Tensor& a, double factor) {
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * factor;
  return make_result(a.shape(), std::move(out), {a}, [factor](Node& n) {
    auto& g = parent_grad(n, 0);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += n.grad[i] * factor;
  });
}

Tensor sum(const Tensor& a) {
  double total = 0.0;
  for (double v : a.data()) total += v;
  return make_result({1}, {total}, {a}, [](Node& n) {
    auto& g = parent_grad(n, 0);
    for (double& v : g) v += n.grad[0];
  });
}

Tensor mean(const Tensor& a) { return scale(sum(a), 1.0 / static_cast<double>(a.numel())); }

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0)) {
    throw Error(ErrorCode::kShapeMismatch,
                "matmul: " + shape_string(a.shape()) + " * " + shape_string(b.shape()));
  }
  const auto m = static_cast<Eigen::Index>(a.dim(0));
  const auto k = static_cast<Eigen::Index>(a.dim(1));
  const auto nn = static_cast<Eigen::Index>(b.dim(1));
  std::vector<double> out(static_cast<std::size_t>(m * nn));
  MapMat(out.data(), m, nn).noalias() =
      ConstMapMat(a.data().data(), m, k) * ConstMapMat(b.data().data(), k, nn);
  return make_result({a.dim(0), b.dim(1)}, std::move(out), {a, b}, [m, k, nn](Node& n) {
    ConstMapMat dy(n.grad.data(), m, nn);
    if (wants_grad(n, 0)) {
      MapMat(parent_grad(n, 0).data(), m, k).noalias() +=
          dy * ConstMapMat(n.parents[1]->value.data(), k, nn).transpose();
    }
    if (wants_grad(n, 1)) {
      MapMat(parent_grad(n, 1).data(), k, nn).noalias() +=
          ConstMapMat(n.parents[0]->value.data(), m, k).transpose() * dy;
    }
  });
}

Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b) {
  if (w.rank() != 2 || x.rank() == 0 || x.shape().back() != w.dim(0)) {
    throw Error(ErrorCode::kShapeMismatch,
                "linear: input " + shape_string(x.shape()) + " vs weight " + shape_string(w.shape()));
  }
  if (b.defined() && (b.rank() != 1 || b.dim(0) != w.dim(1))) {
    throw Error(ErrorCode::kShapeMismatch, "linear: bias " + shape_string(b.shape()));
  }
  const auto d_in = static_cast<Eigen::Index>(w.dim(0));
  const auto d_out = static_cast<Eigen::Index>(w.dim(1));
  const auto rows = static_cast<Eigen::Index>(x.numel()) / d_in;
  Shape out_shape = x.shape();
  out_shape.back() = w.dim(1);

  std::vector<double> out(static_cast<std::size_t>(rows * d_out));
  MapMat y(out.data(), rows, d_out);
  y.noalias() = ConstMapMat(x.data().data(), rows, d_in) * ConstMapMat(w.data().data(), d_in, d_out);
  if (b.defined()) y.rowwise() += Eigen::Map<const Eigen::RowVectorXd>(b.data().data(), d_out);

  std::vector<Tensor> parents{x, w};
  if (b.defined()) parents.push_back(b);
  return make_result(std::move(out_shape), std::move(out), std::move(parents),
                     [rows, d_in, d_out](Node& n) {
                       ConstMapMat dy(n.grad.data(), rows, d_out);
                       if (wants_grad(n, 0)) {
                         MapMat(parent_grad(n, 0).data(), rows, d_in).noalias() +=
                             dy * ConstMapMat(n.parents[1]->value.data(), d_in, d_out).transpose();
                       }
                       if (wants_grad(n, 1)) {
                         MapMat(parent_grad(n, 1).data(), d_in, d_out).noalias() +=
                             ConstMapMat(n.parents[0]->value.data(), rows, d_in).transpose() * dy;
                       }
                       if (n.parents.size() > 2 && wants_grad(n, 2)) {
                         Eigen::Map<Eigen::RowVectorXd>(parent_grad(n, 2).data(), d_out) +=
                             dy.colwise().sum();
                       }
                     });
}

Tensor reshape(const Tensor& x, Shape shape) {
  if (numel(shape) != x.numel()) {
    throw Error(ErrorCode::kShapeMismatch,
                "reshape: " + shape_string(x.shape()) + " -> " + shape_string(shape));
  }
  std::vector<double> out(x.data().begin(), x.data().end());
  return make_result(std::move(shape), std::move(out), {x}, [](Node& n) {
    auto& g = parent_grad(n, 0);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += n.grad[i];
  });
}

namespace {

/// For each output linear index, the input linear index it reads from.
std::vector<std::size_t> permutation_map(const Shape& in_shape, const std::vector<std::size_t>& axes) {
  const std::size_t rank = in_shape.size();
  std::vector<std::size_t> in_strides(rank, 1);
  for (std::size_t i = rank; i-- > 1;) in_strides[i - 1] = in_strides[i] * in_shape[i];
  Shape out_shape(rank);
  std::vector<std::size_t> stride_of_out(rank);
  for (std::size_t i = 0; i < rank; ++i) {
    out_shape[i] = in_shape[axes[i]];
    stride_of_out[i] = in_strides[axes[i]];
  }
  std::vector<std::size_t> map(numel(in_shape));
  std::vector<std::size_t> idx(rank, 0);
  std::size_t src = 0;
  for (std::size_t o = 0; o < map.size(); ++o) {
    map[o] = src;
    for (std::size_t d = rank; d-- > 0;) {
      if (++idx[d] < out_shape[d]) {
        src += stride_of_out[d];
        break;
      }
      src -= stride_of_out[d] * (out_shape[d] - 1);
      idx[d] = 0;
    }
  }
  return map;
}

}  // namespace

Tensor permute(const Tensor& x, const std::vector<std::size_t>& axes) {
  const auto& shape = x.shape();
  if (axes.size() != shape.size()) throw Error(ErrorCode::kShapeMismatch, "permute: rank mismatch");
  std::vector<bool> seen(axes.size(), false);
  Shape out_shape(axes.size());
  for (std::size_t i = 0; i < axes.size(); ++i) {
    if (axes[i] >= axes.size() || seen[axes[i]]) {
      throw Error(ErrorCode::kShapeMismatch, "permute: invalid axis list");
    }
    seen[axes[i]] = true;
    out_shape[i] = shape[axes[i]];
  }
  auto map = permutation_map(shape, axes);
  std::vector<double> out(map.size());
  const auto in = x.data();
  for (std::size_t o = 0; o < out.size(); ++o) out[o] = in[map[o]];
  return make_result(std::move(out_shape), std::move(out), {x}, [map = std::move(map)](Node& n) {
    auto& g = parent_grad(n, 0);
    for (std::size_t o = 0; o < map.size(); ++o) g[map[o]] += n.grad[o];
  });
}

namespace {

struct AxisSplit {
  std::size_t outer = 1;
  std::size_t inner = 1;
};

AxisSplit split_at(const Shape& shape, std::size_t axis) {
  AxisSplit s;
  for (std::size_t i = 0; i < axis; ++i) s.outer *= shape[i];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) s.inner *= shape[i];
  return s;
}

}  // namespace

Tensor concat(const std::vector<Tensor>& parts, std::size_t axis) {
  if (parts.empty()) throw Error(ErrorCode::kShapeMismatch, "concat: no inputs");
  Shape out_shape = parts.front().shape();
  if (axis >= out_shape.size()) throw Error(ErrorCode::kShapeMismatch, "concat: axis out of range");
  std::size_t total = 0;
  std::vector<std::size_t> extents;
  for (const auto& p : parts) {
    Shape s = p.shape();
    if (s.size() != out_shape.size()) throw Error(ErrorCode::kShapeMismatch, "concat: rank mismatch");
    extents.push_back(s[axis]);
    total += s[axis];
    s[axis] = out_shape[axis];
    if (s != out_shape) throw Error(ErrorCode::kShapeMismatch, "concat: incompatible shapes");
  }
  out_shape[axis] = total;
  const AxisSplit split = split_at(out_shape, axis);

  std::vector<double> out(numel(out_shape));
  std::size_t offset = 0;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const auto src = parts[p].data();
    const std::size_t block = extents[p] * split.inner;
    for (std::size_t o = 0; o < split.outer; ++o) {
      std::copy_n(src.data() + o * block, block, out.data() + o * total * split.inner + offset);
    }
    offset += block;
  }
  return make_result(out_shape, std::move(out), parts, [extents, split, total](Node& n) {
    std::size_t offset = 0;
    for (std::size_t p = 0; p < extents.size(); ++p) {
      const std::size_t block = extents[p] * split.inner;
      if (wants_grad(n, p)) {
        auto& g = parent_grad(n, p);
        for (std::size_t o = 0; o < split.outer; ++o) {
          const double* src = n.grad.data() + o * total * split.inner + offset;
          double* dst = g.data() + o * block;
          for (std::size_t i = 0; i < block; ++i) dst[i] += src[i];
        }
      }
      offset += block;
    }
  });
}

Tensor slice(const Tensor& x, std::size_t axis, std::size_t start, std::size_t length) {
  const Shape& shape = x.shape();
  if (axis >= shape.size() || start + length > shape[axis] || length == 0) {
    throw Error(ErrorCode::kShapeMismatch, "slice out of range for " + shape_string(shape));
  }
  const AxisSplit split = split_at(shape, axis);
  const std::size_t extent = shape[axis];
  Shape out_shape = shape;
  out_shape[axis] = length;
  std::vector<double> out(numel(out_shape));
  const auto in = x.data();
  for (std::size_t o = 0; o < split.outer; ++o) {
    std::copy_n(in.data() + (o * extent + start) * split.inner, length * split.inner,
                out.data() + o * length * split.inner);
  }
  return make_result(std::move(out_shape), std::move(out), {x},
                     [split, extent, start, length](Node& n) {
                       auto& g = parent_grad(n, 0);
                       for (std::size_t o = 0; o < split.outer; ++o) {
                         const double* src = n.grad.data() + o * length * split.inner;
                         double* dst = g.data() + (o * extent + start) * split.inner;
                         for (std::size_t i = 0; i < length * split.inner; ++i) dst[i] += src[i];
                       }
                     });
}

Tensor repeat_rows(const Tensor& v, std::size_t n_rows) {
  if (v.rank() != 1) throw Error(ErrorCode::kShapeMismatch, "repeat_rows expects a vector");
  const std::size_t d = v.numel();
  std::vector<double> out(n_rows * d);
  for (std::size_t r = 0; r < n_rows; ++r) std::copy_n(v.data().data(), d, out.data() + r * d);
  return make_result({n_rows, d}, std::move(out), {v}, [d](Node& n) {
    auto& g = parent_grad(n, 0);
    for (std::size_t i = 0; i < n.grad.size(); ++i) g[i % d] += n.grad[i];
  });
}

Tensor relu(const Tensor& x) {
  return unary(
      x, [](double v) { return v > 0.0 ? v : 0.0; },
      [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

Tensor elu(const Tensor& x) {
  return unary(
      x, [](double v) { return v > 0.0 ? v : std::expm1(v); },
      [](double v, double y) { return v > 0.0 ? 1.0 : y + 1.0; });
}

Tensor gelu(const Tensor& x) {
  return unary(
      x, [](double v) { return 0.5 * v * (1.0 + std::erf(v / std::numbers::sqrt2)); },
      [](double v, double) {
        const double cdf = 0.5 * (1.0 + std::erf(v / std::numbers::sqrt2));
        const double pdf = std::exp(-0.5 * v * v) / std::sqrt(2.0 * std::numbers::pi);
        return cdf + v * pdf;
      });
}

Tensor sigmoid(const Tensor& x) {
  return unary(
      x,
      [](double v) {
        if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
        const double e = std::exp(v);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor log1p(const Tensor& x) {
  return unary(
      x, [](double v) { return std::log1p(v); }, [](double v, double) { return 1.0 / (1.0 + v); });
}

Tensor softmax(const Tensor& x) {
  const std::size_t d = x.shape().back();
  const std::size_t rows = x.numel() / d;
  std::vector<double> out(x.numel());
  const auto in = x.data();
  for (std::size_t r = 0; r < rows; ++r) {
    const double* src = in.data() + r * d;
    double* dst = out.data() + r * d;
    const double peak = *std::max_element(src, src + d);
    double total = 0.0;
    for (std::size_t i = 0; i < d; ++i) total += (dst[i] = std::exp(src[i] - peak));
    for (std::size_t i = 0; i < d; ++i) dst[i] /= total;
  }
  return make_result(x.shape(), std::move(out), {x}, [rows, d](Node& n) {
    auto& g = parent_grad(n, 0);
    for (std::size_t r = 0; r < rows; ++r) {
      const double* y = n.value.data() + r * d;
      const double* dy = n.grad.data() + r * d;
      double dot = 0.0;
      for (std::size_t i = 0; i < d; ++i) dot += dy[i] * y[i];
      for (std::size_t i = 0; i < d; ++i) g[r * d + i] += y[i] * (dy[i] - dot);
    }
  });
}

Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps) {
  const std::size_t d = x.shape().back();
  if (gamma.numel() != d || beta.numel() != d) {
    throw Error(ErrorCode::kShapeMismatch, "layer_norm: affine size must equal the last dimension");
  }
  const std::size_t rows = x.numel() / d;
  std::vector<double> out(x.numel());
  std::vector<double> xhat(x.numel());
  std::vector<double> inv_std(rows);
  const auto in = x.data();
  const auto gm = gamma.data();
  const auto bt = beta.data();
  for (std::size_t r = 0; r < rows; ++r) {
    const double* src = in.data() + r * d;
    double mu = 0.0;
    for (std::size_t i = 0; i < d; ++i) mu += src[i];
    mu /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t i = 0; i < d; ++i) var += (src[i] - mu) * (src[i] - mu);
    var /= static_cast<double>(d);
    inv_std[r] = 1.0 / std::sqrt(var + eps);
    for (std::size_t i = 0; i < d; ++i) {
      xhat[r * d + i] = (src[i] - mu) * inv_std[r];
      out[r * d + i] = gm[i] * xhat[r * d + i] + bt[i];
    }
  }
  return make_result(x.shape(), std::move(out), {x, gamma, beta},
                     [rows, d, xhat = std::move(xhat), inv_std = std::move(inv_std)](Node& n) {
                       const auto& gm = n.parents[1]->value;
                       if (wants_grad(n, 0)) {
                         auto& g = parent_grad(n, 0);
                         for (std::size_t r = 0; r < rows; ++r) {
                           double mean_dxhat = 0.0;
                           double mean_dxhat_xhat = 0.0;
                           for (std::size_t i = 0; i < d; ++i) {
                             const double dxh = n.grad[r * d + i] * gm[i];
                             mean_dxhat += dxh;
                             mean_dxhat_xhat += dxh * xhat[r * d + i];
                           }
                           mean_dxhat /= static_cast<double>(d);
                           mean_dxhat_xhat /= static_cast<double>(d);
                           for (std::size_t i = 0; i < d; ++i) {
                             const double dxh = n.grad[r * d + i] * gm[i];
                             g[r * d + i] +=
                                 inv_std[r] * (dxh - mean_dxhat - xhat[r * d + i] * mean_dxhat_xhat);
                           }
                         }
                       }
                       if (wants_grad(n, 1)) {
                         auto& g = parent_grad(n, 1);
                         for (std::size_t k = 0; k < rows * d; ++k) g[k % d] += n.grad[k] * xhat[k];
                       }
                       if (wants_grad(n, 2)) {
                         auto& g = parent_grad(n, 2);
                         for (std::size_t k = 0; k < rows * d; ++k) g[k % d] += n.grad[k];
                       }
                     });
}

Tensor batch_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps) {
  if (x.rank() < 2) throw Error(ErrorCode::kShapeMismatch, "batch_norm expects [C x ...]");
  const std::size_t channels = x.dim(0);
  if (gamma.numel() != channels || beta.numel() != channels) {
    throw Error(ErrorCode::kShapeMismatch, "batch_norm: affine size must equal the channel count");
  }
  const std::size_t m = x.numel() / channels;
  std::vector<double> out(x.numel());
  std::vector<double> xhat(x.numel());
  std::vector<double> inv_std(channels);
  const auto in = x.data();
  for (std::size_t c = 0; c < channels; ++c) {
    const double* src = in.data() + c * m;
    double mu = 0.0;
    for (std::size_t i = 0; i < m; ++i) mu += src[i];
    mu /= static_cast<double>(m);
    double var = 0.0;
    for (std::size_t i = 0; i < m; ++i) var += (src[i] - mu) * (src[i] - mu);
    var /= static_cast<double>(m);
    inv_std[c] = 1.0 / std::sqrt(var + eps);
    const double gm = gamma.data()[c];
    const double bt = beta.data()[c];
    for (std::size_t i = 0; i < m; ++i) {
      xhat[c * m + i] = (src[i] - mu) * inv_std[c];
      out[c * m + i] = gm * xhat[c * m + i] + bt;
    }
  }
  return make_result(x.shape(), std::move(out), {x, gamma, beta},
                     [channels, m, xhat = std::move(xhat), inv_std = std::move(inv_std)](Node& n) {
                       const auto& gm = n.parents[1]->value;
                       for (std::size_t c = 0; c < channels; ++c) {
                         const double* dy = n.grad.data() + c * m;
                         const double* xh = xhat.data() + c * m;
                         double sum_dy = 0.0;
                         double sum_dy_xhat = 0.0;
                         for (std::size_t i = 0; i < m; ++i) {
                           sum_dy += dy[i];
                           sum_dy_xhat += dy[i] * xh[i];
                         }
                         if (wants_grad(n, 0)) {
                           auto& g = parent_grad(n, 0);
                           const double k = gm[c] * inv_std[c];
                           const double mean_dy = sum_dy / static_cast<double>(m);
                           const double mean_dy_xhat = sum_dy_xhat / static_cast<double>(m);
                           for (std::size_t i = 0; i < m; ++i) {
                             g[c * m + i] += k * (dy[i] - mean_dy - xh[i] * mean_dy_xhat);
                           }
                         }
                         if (wants_grad(n, 1)) parent_grad(n, 1)[c] += sum_dy_xhat;
                         if (wants_grad(n, 2)) parent_grad(n, 2)[c] += sum_dy;
                       }
                     });
}

Tensor dropout(const Tensor& x, double p, std::mt19937_64& rng) {
  if (p <= 0.0) return x;
  if (p >= 1.0) throw Error(ErrorCode::kInvalidArgument, "dropout probability must be < 1");
  std::bernoulli_distribution keep(1.0 - p);
  const double gain = 1.0 / (1.0 - p);
  std::vector<double> mask(x.numel());
  std::vector<double> out(x.numel());
  for (std::size_t i = 0; i < out.size(); ++i) {
    mask[i] = keep(rng) ? gain : 0.0;
    out[i] = x.data()[i] * mask[i];
  }
  return make_result(x.shape(), std::move(out), {x}, [mask = std::move(mask)](Node& n) {
    auto& g = parent_grad(n, 0);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += n.grad[i] * mask[i];
  });
}

Tensor weighted_bce_with_logits(const Tensor& logits, std::span<const double> labels,
                                std::span<const double> weights) {
  const std::size_t count = logits.numel();
  if (labels.size() != count || weights.size() != count) {
    throw Error(ErrorCode::kShapeMismatch, "weighted_bce: labels/weights must match the logits");
  }
  constexpr double kClamp = 30.0;
  double total = 0.0;
  std::vector<double> dloss(count);
  const auto z_in = logits.data();
  for (std::size_t i = 0; i < count; ++i) {
    const double z = std::clamp(z_in[i], -kClamp, kClamp);
    const double softplus = std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
    total += weights[i] * (softplus - labels[i] * z);
    const double sig = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
    dloss[i] = weights[i] * (sig - labels[i]) / static_cast<double>(count);
  }
  return make_result({1}, {total / static_cast<double>(count)}, {logits},
                     [dloss = std::move(dloss)](Node& n) {
                       auto& g = parent_grad(n, 0);
                       for (std::size_t i = 0; i < g.size(); ++i) g[i] += n.grad[0] * dloss[i];
                     });
}

}  // namespace beatforge::nn
