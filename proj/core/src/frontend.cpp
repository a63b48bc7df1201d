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

#include "beatforge/frontend.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "beatforge/errors.hpp"

namespace beatforge {

void FrontendConfig::validate() const {
  if (sample_rate <= 0 || window_length <= 0 || base_hop <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "frontend sizes must be positive");
  }
  if (window_length % 2 != 0) {
    throw Error(ErrorCode::kInvalidArgument, "window_length must be even");
  }
  if (window_length < base_hop) {
    throw Error(ErrorCode::kInvalidArgument, "window_length must be >= base_hop");
  }
  if (!(fmin > 0.0 && fmin < fmax && fmax <= sample_rate / 2.0)) {
    throw Error(ErrorCode::kInvalidArgument, "need 0 < fmin < fmax <= sample_rate / 2");
  }
  if (n_bands < 2) throw Error(ErrorCode::kInvalidArgument, "n_bands must be >= 2");
}

Matrix stft_magnitude(std::span<const double> samples, const FrontendConfig& cfg, int hop) {
  const auto window = static_cast<std::size_t>(cfg.window_length);
  if (hop <= 0) throw Error(ErrorCode::kInvalidArgument, "hop must be positive");
  if (samples.size() < window) {
    throw Error(ErrorCode::kTooShort, "clip shorter than one analysis window");
  }
  const std::size_t n_frames = 1 + (samples.size() - window) / static_cast<std::size_t>(hop);
  const std::size_t n_bins = window / 2 + 1;

  std::vector<double> hann(window);
  for (std::size_t n = 0; n < window; ++n) {
    hann[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / window);
  }

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> frame(window);
  std::vector<std::complex<double>> spectrum;

  Matrix out(n_frames, n_bins);
  for (std::size_t t = 0; t < n_frames; ++t) {
    const double* src = samples.data() + t * static_cast<std::size_t>(hop);
    for (std::size_t n = 0; n < window; ++n) frame[n] = src[n] * hann[n];
    fft.fwd(spectrum, frame);
    for (std::size_t k = 0; k < n_bins; ++k) out(t, k) = std::abs(spectrum[k]);
  }
  return out;
}

Filterbank::Filterbank(const FrontendConfig& cfg) {
  cfg.validate();
  const auto n_bands = static_cast<std::size_t>(cfg.n_bands);
  const auto n_bins = static_cast<std::size_t>(cfg.n_bins());
  const double ratio = std::pow(cfg.fmax / cfg.fmin, 1.0 / static_cast<double>(n_bands - 1));

  centers_.resize(n_bands);
  for (std::size_t b = 0; b < n_bands; ++b) {
    centers_[b] = cfg.fmin * std::pow(ratio, static_cast<double>(b));
  }
  edges_.reserve(n_bands + 2);
  edges_.push_back(cfg.fmin / ratio);
  edges_.insert(edges_.end(), centers_.begin(), centers_.end());
  edges_.push_back(cfg.fmax * ratio);

  const double bin_hz = static_cast<double>(cfg.sample_rate) / cfg.window_length;
  weights_ = Matrix(n_bins, n_bands);
  for (std::size_t b = 0; b < n_bands; ++b) {
    const double lo = edges_[b];
    const double mid = edges_[b + 1];
    const double hi = edges_[b + 2];
    double total = 0.0;
    for (std::size_t k = 0; k < n_bins; ++k) {
      const double f = static_cast<double>(k) * bin_hz;
      double w = 0.0;
      if (f > lo && f <= mid) {
        w = (f - lo) / (mid - lo);
      } else if (f > mid && f < hi) {
        w = (hi - f) / (hi - mid);
      }
      weights_(k, b) = w;
      total += w;
    }
    // Low bands are narrower than one bin; give them the nearest bin.
    if (total <= 0.0) {
      const auto nearest = std::min(n_bins - 1, static_cast<std::size_t>(std::lround(mid / bin_hz)));
      weights_(nearest, b) = 1.0;
    }
  }
}

HarmonicRepresentation harmonic_filterbank(const Matrix& spectrogram, const FrontendConfig& cfg,
                                           const Filterbank& bank, int hop) {
  const Matrix& w = bank.weights();
  if (spectrogram.cols != w.rows) {
    throw Error(ErrorCode::kShapeMismatch, "spectrogram column count must be window_length/2+1");
  }
  HarmonicRepresentation rep;
  rep.effective_hop = hop;
  rep.frame_rate = static_cast<double>(cfg.sample_rate) / hop;
  rep.values = Matrix(spectrogram.rows, w.cols);
  for (std::size_t t = 0; t < spectrogram.rows; ++t) {
    auto out = rep.values.row(t);
    const auto in = spectrogram.row(t);
    for (std::size_t k = 0; k < w.rows; ++k) {
      const double m = in[k];
      if (m == 0.0) continue;
      const auto wk = w.row(k);
      for (std::size_t b = 0; b < w.cols; ++b) out[b] += m * wk[b];
    }
    for (double& v : out) v = std::log1p(v);
  }
  return rep;
}

HarmonicRepresentation harmonic_filterbank(const Matrix& spectrogram, const FrontendConfig& cfg) {
  return harmonic_filterbank(spectrogram, cfg, Filterbank(cfg), cfg.base_hop);
}

int augment_hop(int base_hop, std::mt19937_64& rng, double std_dev) {
  if (std_dev <= 0.0) return base_hop;
  std::normal_distribution<double> scale(1.0, std_dev);
  const double s = std::clamp(scale(rng), 0.8, 1.2);
  return static_cast<int>(std::lround(base_hop * s));
}

TargetMatrix build_targets(const BeatAnnotation& annotation, std::size_t n_frames,
                           double frame_rate) {
  if (!(frame_rate > 0.0)) throw Error(ErrorCode::kInvalidArgument, "frame_rate must be positive");

  TargetMatrix targets;
  targets.labels = Matrix(n_frames, 3);
  targets.weights = Matrix(n_frames, 3);
  std::vector<double> positive_weight(n_frames * 2, 0.0);  // beat, downbeat

  auto mark = [&](std::size_t channel, std::ptrdiff_t frame, double weight) {
    if (frame < 0 || frame >= static_cast<std::ptrdiff_t>(n_frames)) return;
    double& slot = positive_weight[static_cast<std::size_t>(frame) * 2 + channel];
    slot = std::max(slot, weight);
  };

  for (const auto& event : annotation.events) {
    const auto frame = static_cast<std::ptrdiff_t>(std::llround(event.time * frame_rate));
    if (frame < 0 || frame >= static_cast<std::ptrdiff_t>(n_frames)) {
      throw Error(ErrorCode::kEventOutOfRange,
                  "event at " + std::to_string(event.time) + " s maps outside the frame range");
    }
    for (std::size_t channel : {std::size_t{0}, std::size_t{1}}) {
      if (channel == 1 && !event.is_downbeat()) continue;
      mark(channel, frame, 1.0);
      mark(channel, frame - 1, 0.5);
      mark(channel, frame + 1, 0.5);
    }
  }

  for (std::size_t t = 0; t < n_frames; ++t) {
    for (std::size_t channel : {std::size_t{0}, std::size_t{1}}) {
      const double w = positive_weight[t * 2 + channel];
      targets.labels(t, channel) = w > 0.0 ? 1.0 : 0.0;
      targets.weights(t, channel) = w > 0.0 ? w : 1.0;
    }
    targets.labels(t, kNonBeat) = 1.0 - targets.labels(t, kBeat);
    targets.weights(t, kNonBeat) = targets.weights(t, kBeat);
  }
  return targets;
}

FeatureExtractor::FeatureExtractor(FrontendConfig cfg)
    : cfg_(cfg), bank_(std::make_shared<const Filterbank>(cfg_)) {}

HarmonicRepresentation FeatureExtractor::compute(const AudioClip& clip, int hop) const {
  if (clip.sample_rate != cfg_.sample_rate) {
    throw Error(ErrorCode::kInvalidArgument, "clip must be resampled to the frontend rate first");
  }
  if (clip.samples.empty()) throw Error(ErrorCode::kTooShort, "empty clip");
  const std::size_t n_frames = 1 + clip.samples.size() / static_cast<std::size_t>(hop);
  return compute_window(clip.samples, 0, n_frames, hop);
}

HarmonicRepresentation FeatureExtractor::compute_window(std::span<const double> samples,
                                                        std::ptrdiff_t start_sample,
                                                        std::size_t n_frames, int hop) const {
  if (n_frames == 0) throw Error(ErrorCode::kTooShort, "zero frames requested");
  const auto half = static_cast<std::ptrdiff_t>(cfg_.window_length / 2);
  const std::size_t span = (n_frames - 1) * static_cast<std::size_t>(hop) +
                           static_cast<std::size_t>(cfg_.window_length);
  std::vector<double> padded(span, 0.0);
  const std::ptrdiff_t origin = start_sample - half;
  const auto len = static_cast<std::ptrdiff_t>(samples.size());
  for (std::size_t i = 0; i < span; ++i) {
    const std::ptrdiff_t src = origin + static_cast<std::ptrdiff_t>(i);
    if (src >= 0 && src < len) padded[i] = samples[static_cast<std::size_t>(src)];
  }
  return harmonic_filterbank(stft_magnitude(padded, cfg_, hop), cfg_, *bank_, hop);
}

void export_representation(const HarmonicRepresentation& rep, const std::filesystem::path& bin_path) {
  auto sidecar = bin_path;
  sidecar += ".json";
  write_float32_matrix(bin_path, sidecar, rep.values,
                       {{"n_frames", rep.n_frames()},
                        {"n_bands", rep.n_bands()},
                        {"frame_rate", rep.frame_rate},
                        {"effective_hop", rep.effective_hop}});
}

HarmonicRepresentation import_representation(const std::filesystem::path& bin_path) {
  auto sidecar = bin_path;
  sidecar += ".json";
  HarmonicRepresentation rep;
  rep.values = read_float32_matrix(bin_path, sidecar, "n_frames", "n_bands");
  std::ifstream in(sidecar);
  const auto meta = nlohmann::json::parse(in);
  rep.frame_rate = meta.at("frame_rate").get<double>();
  rep.effective_hop = meta.value("effective_hop", 0);
  return rep;
}

}  // namespace beatforge
