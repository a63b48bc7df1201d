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

#include "beatforge/audio_io.hpp"
#include "beatforge/dbn.hpp"
#include "beatforge/frontend.hpp"
#include "beatforge/models/model.hpp"

namespace beatforge {

/// Model activations over a whole clip (already at the front-end rate).
/// The clip is cut into windows of the model's input length with 50%
/// overlap; overlapping activations are averaged. Clips shorter than one
/// window are zero-padded (with a warning) and the result trimmed back.
/// `branch` >= 0 restricts the output to one head of a multi-head model.
ActivationMatrix predict_activations(const models::BeatModel& model,
                                     const FeatureExtractor& extractor, const AudioClip& clip,
                                     int branch = -1);

/// Window start frames used for a clip of `frames` frames and windows of
/// `window` frames: 0, window/2, ..., with the last window flush to the end.
std::vector<std::size_t> window_starts(std::size_t frames, std::size_t window);

/// Full pipeline: resample, features at the base hop, activations, decoding.
DecodeResult track(const AudioClip& clip, const models::BeatModel& model,
                   const FeatureExtractor& extractor, const DbnConfig& dbn);

}  // namespace beatforge
