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

/// Dilated temporal convolution with zero "same" padding.
/// x: [C_in x T], w: [C_out x C_in x K] (K odd), b: [C_out] or undefined.
/// Output [C_out x T]; receptive field (K - 1) * dilation + 1.
Tensor conv1d(const Tensor& x, const Tensor& w, const Tensor& b, std::size_t dilation = 1);

struct Conv2dGeometry {
  std::size_t stride_f = 1;
  std::size_t stride_t = 1;
  std::size_t pad_f = 0;
  std::size_t pad_t = 0;
};

/// Cross-correlation over [C_in x F x T] with w: [C_out x C_in x KF x KT].
/// Output F' = (F + 2 pad_f - KF) / stride_f + 1, likewise for T.
Tensor conv2d(const Tensor& x, const Tensor& w, const Tensor& b, Conv2dGeometry geometry = {});

/// Non-overlapping max over frequency windows of x: [C x F x T]. A trailing
/// partial window is padded with -inf, so F' = ceil(F / pool).
Tensor max_pool_freq(const Tensor& x, std::size_t pool);

}  // namespace beatforge::nn
