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

#include <nlohmann/json.hpp>

#include "beatforge/audio_io.hpp"
#include "beatforge/matrix.hpp"

namespace beatforge {

/// Per-frame probabilities [T x 3]: beat, downbeat, non-beat.
struct ActivationMatrix {
  Matrix values;
  double frame_rate = 50.0;

  std::size_t frames() const { return values.rows; }
};

struct DbnConfig {
  double min_bpm = 55.0;
  double max_bpm = 215.0;
  /// 0 keeps one state per integer frames-per-beat in range; otherwise that
  /// many tempi, spread log-uniformly over the range.
  std::size_t n_tempi = 0;
  double tempo_change_prob = 0.002;
  std::vector<int> meters = {3, 4};
  /// Fraction of each beat period, centred on the beat, that observes the
  /// beat (or downbeat) activation; at least one frame either side.
  double observation_fraction = 1.0 / 16.0;

  void validate() const;
};

void to_json(nlohmann::json& j, const DbnConfig& cfg);
void from_json(const nlohmann::json& j, DbnConfig& cfg);

/// Hidden state of the bar-pointer model.
struct BarState {
  int meter = 4;
  int frames_per_beat = 1;
  int position = 0;     // frames since the last beat, in [0, frames_per_beat)
  int beat_in_bar = 0;  // 0 = downbeat, in [0, meter)

  double beat_phase() const { return static_cast<double>(position) / frames_per_beat; }
  friend bool operator==(const BarState&, const BarState&) = default;
};

using StatePath = std::vector<BarState>;

struct DecodeResult {
  BeatAnnotation annotation;
  StatePath path;
  double log_score = 0.0;
  /// Set when every beat and downbeat activation is (near) zero; the grid is
  /// then driven by the prior alone.
  bool low_confidence = false;
};

/// Integer beat periods (frames) covered by the config at `frame_rate`.
std::vector<int> tempo_states(const DbnConfig& cfg, double frame_rate);

/// Exact Viterbi decoding over the bar-pointer state space. Ties between
/// equal-score states resolve to the lower tempo (longer period), then the
/// earlier position in the bar, then the smaller meter.
DecodeResult decode(const ActivationMatrix& act, const DbnConfig& cfg);

/// Reference decoder: the same model evaluated as a dense state-to-state
/// dynamic programme with no structural shortcuts. For small state spaces
/// only (states * frames <= 1e7).
DecodeResult brute_force_decode(const ActivationMatrix& act, const DbnConfig& cfg);

/// Log probability of a full state path (initial, transitions, emissions).
/// Returns -inf for a path the model forbids.
double score_path(const ActivationMatrix& act, const DbnConfig& cfg, const StatePath& path);

/// Beats at every frame whose state sits at position 0.
BeatAnnotation path_to_annotation(const StatePath& path, double frame_rate);

}  // namespace beatforge
