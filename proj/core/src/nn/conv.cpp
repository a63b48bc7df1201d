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

#include "beatforge/nn/conv.hpp"

#include <algorithm>
#include <limits>

#include "beatforge/errors.hpp"

namespace beatforge::nn {

using detail::make_result;
using detail::Node;

namespace {

void check_bias(const Tensor& b, std::size_t c_out) {
  if (b.defined() && (b.rank() != 1 || b.dim(0) != c_out)) {
    throw Error(ErrorCode::kShapeMismatch, "conv bias must have C_out entries");
  }
}

/// Valid output range [lo, hi) for an input index out * stride + offset.
std::pair<std::size_t, std::size_t> valid_range(std::ptrdiff_t offset, std::size_t stride,
                                                std::size_t n_out, std::size_t n_in) {
  std::ptrdiff_t lo = 0;
  if (offset < 0) lo = (-offset + static_cast<std::ptrdiff_t>(stride) - 1) / static_cast<std::ptrdiff_t>(stride);
  std::ptrdiff_t hi = static_cast<std::ptrdiff_t>(n_out);
  // Need out * stride + offset <= n_in - 1.
  const std::ptrdiff_t limit = static_cast<std::ptrdiff_t>(n_in) - 1 - offset;
  if (limit < 0) return {0, 0};
  hi = std::min(hi, limit / static_cast<std::ptrdiff_t>(stride) + 1);
  if (hi <= lo) return {0, 0};
  return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
}

}  // namespace

Tensor conv1d(const Tensor& x, const Tensor& w, const Tensor& b, std::size_t dilation) {
  if (dilation < 1) throw Error(ErrorCode::kInvalidArgument, "dilation must be >= 1");
  if (x.rank() != 2 || w.rank() != 3 || w.dim(1) != x.dim(0)) {
    throw Error(ErrorCode::kShapeMismatch,
                "conv1d: input " + shape_string(x.shape()) + " vs kernel " + shape_string(w.shape()));
  }
  const std::size_t c_in = x.dim(0);
  const std::size_t t_len = x.dim(1);
  const std::size_t c_out = w.dim(0);
  const std::size_t k = w.dim(2);
  if (k % 2 == 0) throw Error(ErrorCode::kShapeMismatch, "conv1d: kernel size must be odd");
  check_bias(b, c_out);
  const auto pad = static_cast<std::ptrdiff_t>((k - 1) * dilation / 2);

  std::vector<double> out(c_out * t_len, 0.0);
  const double* xv = x.data().data();
  const double* wv = w.data().data();
  for (std::size_t co = 0; co < c_out; ++co) {
    double* y = out.data() + co * t_len;
    if (b.defined()) std::fill_n(y, t_len, b.data()[co]);
    for (std::size_t ci = 0; ci < c_in; ++ci) {
      const double* xr = xv + ci * t_len;
      for (std::size_t j = 0; j < k; ++j) {
        const double wt = wv[(co * c_in + ci) * k + j];
        const std::ptrdiff_t offset = static_cast<std::ptrdiff_t>(j * dilation) - pad;
        const auto [lo, hi] = valid_range(offset, 1, t_len, t_len);
        const double* src = xr + offset;
        for (std::size_t t = lo; t < hi; ++t) y[t] += wt * src[t];
      }
    }
  }

  std::vector<Tensor> parents{x, w};
  if (b.defined()) parents.push_back(b);
  return make_result({c_out, t_len}, std::move(out), std::move(parents),
                     [c_in, c_out, t_len, k, dilation, pad](Node& n) {
                       const double* dy = n.grad.data();
                       const double* xv = n.parents[0]->value.data();
                       const double* wv = n.parents[1]->value.data();
                       const bool gx = n.parents[0]->requires_grad;
                       const bool gw = n.parents[1]->requires_grad;
                       double* dx = gx ? n.parents[0]->ensure_grad().data() : nullptr;
                       double* dw = gw ? n.parents[1]->ensure_grad().data() : nullptr;
                       for (std::size_t co = 0; co < c_out; ++co) {
                         const double* g = dy + co * t_len;
                         for (std::size_t ci = 0; ci < c_in; ++ci) {
                           for (std::size_t j = 0; j < k; ++j) {
                             const std::size_t wi = (co * c_in + ci) * k + j;
                             const std::ptrdiff_t offset = static_cast<std::ptrdiff_t>(j * dilation) - pad;
                             const auto [lo, hi] = valid_range(offset, 1, t_len, t_len);
                             if (gx) {
                               double* dst = dx + ci * t_len + offset;
                               const double wt = wv[wi];
                               for (std::size_t t = lo; t < hi; ++t) dst[t] += wt * g[t];
                             }
                             if (gw) {
                               const double* src = xv + ci * t_len + offset;
                               double acc = 0.0;
                               for (std::size_t t = lo; t < hi; ++t) acc += src[t] * g[t];
                               dw[wi] += acc;
                             }
                           }
                         }
                         if (n.parents.size() > 2 && n.parents[2]->requires_grad) {
                           double acc = 0.0;
                           for (std::size_t t = 0; t < t_len; ++t) acc += g[t];
                           n.parents[2]->ensure_grad()[co] += acc;
                         }
                       }
                     });
}

Tensor conv2d(const Tensor& x, const Tensor& w, const Tensor& b, Conv2dGeometry geo) {
  if (x.rank() != 3 || w.rank() != 4 || w.dim(1) != x.dim(0)) {
    throw Error(ErrorCode::kShapeMismatch,
                "conv2d: input " + shape_string(x.shape()) + " vs kernel " + shape_string(w.shape()));
  }
  if (geo.stride_f < 1 || geo.stride_t < 1) throw Error(ErrorCode::kInvalidArgument, "stride must be >= 1");
  const std::size_t c_in = x.dim(0);
  const std::size_t f_in = x.dim(1);
  const std::size_t t_in = x.dim(2);
  const std::size_t c_out = w.dim(0);
  const std::size_t kf = w.dim(2);
  const std::size_t kt = w.dim(3);
  check_bias(b, c_out);
  if (f_in + 2 * geo.pad_f < kf || t_in + 2 * geo.pad_t < kt) {
    throw Error(ErrorCode::kShapeMismatch, "conv2d: kernel larger than padded input");
  }
  const std::size_t f_out = (f_in + 2 * geo.pad_f - kf) / geo.stride_f + 1;
  const std::size_t t_out = (t_in + 2 * geo.pad_t - kt) / geo.stride_t + 1;

  std::vector<double> out(c_out * f_out * t_out, 0.0);
  const double* xv = x.data().data();
  const double* wv = w.data().data();
  const std::size_t st = geo.stride_t;
  for (std::size_t co = 0; co < c_out; ++co) {
    double* yc = out.data() + co * f_out * t_out;
    if (b.defined()) std::fill_n(yc, f_out * t_out, b.data()[co]);
    for (std::size_t ci = 0; ci < c_in; ++ci) {
      const double* xc = xv + ci * f_in * t_in;
      for (std::size_t a = 0; a < kf; ++a) {
        const std::ptrdiff_t off_f = static_cast<std::ptrdiff_t>(a) - static_cast<std::ptrdiff_t>(geo.pad_f);
        const auto [flo, fhi] = valid_range(off_f, geo.stride_f, f_out, f_in);
        for (std::size_t c = 0; c < kt; ++c) {
          const double wt = wv[((co * c_in + ci) * kf + a) * kt + c];
          const std::ptrdiff_t off_t = static_cast<std::ptrdiff_t>(c) - static_cast<std::ptrdiff_t>(geo.pad_t);
          const auto [tlo, thi] = valid_range(off_t, st, t_out, t_in);
          for (std::size_t fo = flo; fo < fhi; ++fo) {
            const std::size_t fi = fo * geo.stride_f + static_cast<std::size_t>(off_f);
            const double* src = xc + fi * t_in + off_t;
            double* dst = yc + fo * t_out;
            if (st == 1) {
              for (std::size_t t = tlo; t < thi; ++t) dst[t] += wt * src[t];
            } else {
              for (std::size_t t = tlo; t < thi; ++t) dst[t] += wt * src[t * st];
            }
          }
        }
      }
    }
  }

  std::vector<Tensor> parents{x, w};
  if (b.defined()) parents.push_back(b);
  return make_result(
      {c_out, f_out, t_out}, std::move(out), std::move(parents),
      [=](Node& n) {
        const double* dy = n.grad.data();
        const double* xv = n.parents[0]->value.data();
        const double* wv = n.parents[1]->value.data();
        const bool gx = n.parents[0]->requires_grad;
        const bool gw = n.parents[1]->requires_grad;
        double* dx = gx ? n.parents[0]->ensure_grad().data() : nullptr;
        double* dw = gw ? n.parents[1]->ensure_grad().data() : nullptr;
        for (std::size_t co = 0; co < c_out; ++co) {
          const double* gc = dy + co * f_out * t_out;
          for (std::size_t ci = 0; ci < c_in; ++ci) {
            for (std::size_t a = 0; a < kf; ++a) {
              const std::ptrdiff_t off_f = static_cast<std::ptrdiff_t>(a) - static_cast<std::ptrdiff_t>(geo.pad_f);
              const auto [flo, fhi] = valid_range(off_f, geo.stride_f, f_out, f_in);
              for (std::size_t c = 0; c < kt; ++c) {
                const std::size_t wi = ((co * c_in + ci) * kf + a) * kt + c;
                const std::ptrdiff_t off_t = static_cast<std::ptrdiff_t>(c) - static_cast<std::ptrdiff_t>(geo.pad_t);
                const auto [tlo, thi] = valid_range(off_t, st, t_out, t_in);
                const double wt = wv[wi];
                double acc = 0.0;
                for (std::size_t fo = flo; fo < fhi; ++fo) {
                  const std::size_t fi = fo * geo.stride_f + static_cast<std::size_t>(off_f);
                  const std::size_t base = ci * f_in * t_in + fi * t_in;
                  const double* g = gc + fo * t_out;
                  if (gx) {
                    double* dst = dx + base + off_t;
                    for (std::size_t t = tlo; t < thi; ++t) dst[t * st] += wt * g[t];
                  }
                  if (gw) {
                    const double* src = xv + base + off_t;
                    for (std::size_t t = tlo; t < thi; ++t) acc += src[t * st] * g[t];
                  }
                }
                if (gw) dw[wi] += acc;
              }
            }
          }
          if (n.parents.size() > 2 && n.parents[2]->requires_grad) {
            double acc = 0.0;
            for (std::size_t i = 0; i < f_out * t_out; ++i) acc += gc[i];
            n.parents[2]->ensure_grad()[co] += acc;
          }
        }
      });
}

Tensor max_pool_freq(const Tensor& x, std::size_t pool) {
  if (pool < 1) throw Error(ErrorCode::kInvalidArgument, "pool size must be >= 1");
  if (x.rank() != 3) throw Error(ErrorCode::kShapeMismatch, "max_pool_freq expects [C x F x T]");
  const std::size_t channels = x.dim(0);
  const std::size_t f_in = x.dim(1);
  const std::size_t t_len = x.dim(2);
  const std::size_t f_out = (f_in + pool - 1) / pool;

  std::vector<double> out(channels * f_out * t_len, -std::numeric_limits<double>::infinity());
  std::vector<std::size_t> argmax(out.size(), 0);
  const double* xv = x.data().data();
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t fo = 0; fo < f_out; ++fo) {
      double* dst = out.data() + (c * f_out + fo) * t_len;
      std::size_t* arg = argmax.data() + (c * f_out + fo) * t_len;
      for (std::size_t fi = fo * pool; fi < std::min(f_in, (fo + 1) * pool); ++fi) {
        const std::size_t base = (c * f_in + fi) * t_len;
        for (std::size_t t = 0; t < t_len; ++t) {
          if (xv[base + t] > dst[t]) {
            dst[t] = xv[base + t];
            arg[t] = base + t;
          }
        }
      }
    }
  }
  return make_result({channels, f_out, t_len}, std::move(out), {x}, [argmax = std::move(argmax)](Node& n) {
    auto& g = n.parents[0]->ensure_grad();
    for (std::size_t i = 0; i < argmax.size(); ++i) g[argmax[i]] += n.grad[i];
  });
}

}  // namespace beatforge::nn
