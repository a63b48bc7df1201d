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
#include <filesystem>
#include <memory>
#include <random>
#include <span>

#include "beatforge/audio_io.hpp"
#include "beatforge/matrix.hpp"

namespace beatforge {

struct FrontendConfig {
  int sample_rate = 16000;
  int window_length = 1024;
  int base_hop = 320;  // 50 frames per second at 16 kHz
  int n_bands = 128;
  double fmin = 30.0;
  double fmax = 8000.0;
  double hop_std = 0.05;

  double frame_rate() const { return static_cast<double>(sample_rate) / base_hop; }
  int n_bins() const { return window_length / 2 + 1; }
  /// Throws kInvalidArgument when the invariants do not hold.
  void validate() const;
};

/// Time x band matrix of log-compressed filterbank energies.
struct HarmonicRepresentation {
  Matrix values;  // n_frames x n_bands
  double frame_rate = 0.0;
  int effective_hop = 0;

  std::size_t n_frames() const { return values.rows; }
  std::size_t n_bands() const { return values.cols; }
};

/// Frame-wise training targets. Columns: beat, downbeat, non-beat.
struct TargetMatrix {
  Matrix labels;
  Matrix weights;

  std::size_t n_frames() const { return labels.rows; }
};

enum TargetChannel : std::size_t { kBeat = 0, kDownbeat = 1, kNonBeat = 2 };

/// Magnitudes of the Hann-windowed DFT for frames starting at 0, hop, 2*hop...
/// Result is n_frames x (window_length/2 + 1) with
/// n_frames = 1 + floor((len - window_length) / hop).
Matrix stft_magnitude(std::span<const double> samples, const FrontendConfig& cfg, int hop);

/// Log-spaced triangular filters over the STFT bins.
class Filterbank {
 public:
  explicit Filterbank(const FrontendConfig& cfg);

  /// Weights as an n_bins x n_bands matrix. Exposed so a caller can lift it
  /// into a trainable parameter (nn::HarmonicFilter).
  const Matrix& weights() const { return weights_; }
  std::span<const double> centers() const { return centers_; }
  /// Support [lower, upper] of band `b` in Hz.
  double lower_edge(std::size_t b) const { return edges_[b]; }
  double upper_edge(std::size_t b) const { return edges_[b + 2]; }

 private:
  Matrix weights_;
  std::vector<double> centers_;
  std::vector<double> edges_;  // n_bands + 2 points: lower edge, centres, upper edge
};

/// Applies the filterbank to a magnitude spectrogram and compresses with ln(1 + x).
HarmonicRepresentation harmonic_filterbank(const Matrix& spectrogram, const FrontendConfig& cfg);
HarmonicRepresentation harmonic_filterbank(const Matrix& spectrogram, const FrontendConfig& cfg,
                                           const Filterbank& bank, int hop);

/// Draws a training hop size round(base_hop * s) with s ~ N(1, std) clamped
/// to [0.8, 1.2].
int augment_hop(int base_hop, std::mt19937_64& rng, double std_dev = 0.05);

/// Beat/downbeat targets with +-1 frame widening at half weight.
TargetMatrix build_targets(const BeatAnnotation& annotation, std::size_t n_frames,
                           double frame_rate);

/// Feature extraction with a reusable filterbank. Frames are centred: frame t
/// covers samples around t * hop, so annotation times map to round(t * rate).
class FeatureExtractor {
 public:
  explicit FeatureExtractor(FrontendConfig cfg);

  const FrontendConfig& config() const { return cfg_; }
  const Filterbank& filterbank() const { return *bank_; }

  /// Whole clip (at cfg.sample_rate): 1 + floor(len / hop) frames.
  HarmonicRepresentation compute(const AudioClip& clip, int hop) const;

  /// Exactly `n_frames` frames whose first frame is centred on `start_sample`;
  /// audio outside the clip reads as silence.
  HarmonicRepresentation compute_window(std::span<const double> samples, std::ptrdiff_t start_sample,
                                        std::size_t n_frames, int hop) const;

 private:
  FrontendConfig cfg_;
  std::shared_ptr<const Filterbank> bank_;
};

/// Float32 binary + JSON sidecar {n_frames, n_bands, frame_rate}.
void export_representation(const HarmonicRepresentation& rep, const std::filesystem::path& bin_path);
HarmonicRepresentation import_representation(const std::filesystem::path& bin_path);

}  // namespace beatforge
