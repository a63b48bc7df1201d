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
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "beatforge/audio_io.hpp"

namespace beatforge {

/// Recipe for a synthetic click-track corpus. Tempi are drawn uniformly
/// from [min_bpm, max_bpm]; meters cycle through `meters`.
struct CorpusSpec {
  std::size_t n_train = 10;
  std::size_t n_valid = 3;
  std::size_t n_test = 5;
  double min_bpm = 80.0;
  double max_bpm = 160.0;
  std::vector<int> meters = {3, 4};
  double duration = 30.0;
  int sample_rate = 16000;
  std::uint64_t seed = 0;
  /// Standard deviation of added white noise.
  double noise = 0.0;
};

struct CorpusItem {
  std::string name;
  double tempo_bpm = 0.0;
  int meter = 4;
  Split split = Split::kTrain;
  AudioClip audio;
  BeatAnnotation annotation;
};

std::vector<CorpusItem> make_click_corpus(const CorpusSpec& spec);

/// Writes `<name>.wav` and `<name>.beats` per item plus `manifest.json`,
/// returning the manifest with absolute paths.
DatasetManifest write_corpus(const std::filesystem::path& dir,
                             const std::vector<CorpusItem>& items);

}  // namespace beatforge
