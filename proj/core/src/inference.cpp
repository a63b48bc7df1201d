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

#include "beatforge/inference.hpp"

#include <algorithm>

#include "beatforge/errors.hpp"
#include "beatforge/log.hpp"
#include "beatforge/nn/tensor.hpp"

namespace beatforge {

std::vector<std::size_t> window_starts(std::size_t frames, std::size_t window) {
  if (window == 0) throw Error(ErrorCode::kInvalidArgument, "window must be positive");
  if (frames <= window) return {0};
  const std::size_t step = std::max<std::size_t>(1, window / 2);
  std::vector<std::size_t> starts;
  for (std::size_t s = 0; s + window < frames; s += step) starts.push_back(s);
  starts.push_back(frames - window);
  return starts;
}

ActivationMatrix predict_activations(const models::BeatModel& model,
                                     const FeatureExtractor& extractor, const AudioClip& clip,
                                     int branch) {
  const FrontendConfig& fc = extractor.config();
  if (clip.sample_rate != fc.sample_rate) {
    throw Error(ErrorCode::kInvalidArgument, "clip must be at the front-end sample rate");
  }
  if (static_cast<std::size_t>(fc.n_bands) != model.n_bands()) {
    throw Error(ErrorCode::kShapeMismatch, "model expects " + std::to_string(model.n_bands()) +
                                               " bands, front-end produces " +
                                               std::to_string(fc.n_bands));
  }
  nn::NoGradGuard no_grad;
  const nn::RunContext ctx;
  const std::size_t window = model.input_frames();
  const std::size_t frames = clip.samples.size() / static_cast<std::size_t>(fc.base_hop) + 1;

  ActivationMatrix out;
  out.frame_rate = fc.frame_rate();
  if (frames < window) {
    log::warn("clip has " + std::to_string(frames) + " frames, " + models::to_string(model.arch()) +
              " needs " + std::to_string(window) + "; zero-padding");
    HarmonicRepresentation rep = extractor.compute_window(clip.samples, 0, window, fc.base_hop);
    Matrix act = models::activations(model.forward(models::features_tensor(rep.values), ctx), branch);
    act.rows = frames;
    act.data.resize(frames * act.cols);
    out.values = std::move(act);
    return out;
  }

  HarmonicRepresentation rep = extractor.compute(clip, fc.base_hop);
  Matrix sum(frames, 3);
  std::vector<double> count(frames, 0.0);
  for (std::size_t start : window_starts(frames, window)) {
    Matrix slice(window, rep.values.cols);
    std::copy_n(rep.values.data.begin() + static_cast<std::ptrdiff_t>(start * rep.values.cols),
                window * rep.values.cols, slice.data.begin());
    const Matrix act = models::activations(model.forward(models::features_tensor(slice), ctx), branch);
    for (std::size_t t = 0; t < window; ++t) {
      for (std::size_t c = 0; c < 3; ++c) sum(start + t, c) += act(t, c);
      count[start + t] += 1.0;
    }
  }
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t c = 0; c < 3; ++c) sum(t, c) /= count[t];
  }
  out.values = std::move(sum);
  return out;
}

DecodeResult track(const AudioClip& clip, const models::BeatModel& model,
                   const FeatureExtractor& extractor, const DbnConfig& dbn) {
  const int rate = extractor.config().sample_rate;
  const AudioClip audio = clip.sample_rate == rate ? clip : resample(clip, rate);
  return decode(predict_activations(model, extractor, audio), dbn);
}

}  // namespace beatforge
