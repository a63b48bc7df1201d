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

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "beatforge/errors.hpp"
#include "beatforge/frontend.hpp"
#include "test_util.hpp"

namespace beatforge {
namespace {

std::vector<double> naive_dft_magnitude(const std::vector<double>& frame) {
  const std::size_t n = frame.size();
  std::vector<double> mag(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    double re = 0.0, im = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double phase = 2.0 * std::numbers::pi * static_cast<double>(k * t % n) / n;
      re += frame[t] * std::cos(phase);
      im -= frame[t] * std::sin(phase);
    }
    mag[k] = std::hypot(re, im);
  }
  return mag;
}

double triangle(double f, double lo, double mid, double hi) {
  if (f <= lo || f >= hi) return 0.0;
  return f <= mid ? (f - lo) / (mid - lo) : (hi - f) / (hi - mid);
}

TEST(Stft, ZeroSignal) {
  FrontendConfig cfg;
  const Matrix m = stft_magnitude(std::vector<double>(4000, 0.0), cfg, 320);
  for (double v : m.data) EXPECT_EQ(v, 0.0);
}

TEST(Stft, SingleFrameForWindowLength) {
  FrontendConfig cfg;
  EXPECT_EQ(stft_magnitude(std::vector<double>(1024, 0.1), cfg, 320).rows, 1u);
}

TEST(Stft, TooShort) {
  FrontendConfig cfg;
  try {
    stft_magnitude(std::vector<double>(1023, 0.0), cfg, 320);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTooShort);
  }
}

TEST(Stft, FrameCountMatchesEnumeration) {
  FrontendConfig cfg;
  cfg.window_length = 64;
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t len = 64 + rng() % 2000;
    const int hop = 1 + static_cast<int>(rng() % 80);
    std::size_t placements = 0;
    for (std::size_t start = 0; start + 64 <= len; start += static_cast<std::size_t>(hop)) ++placements;
    EXPECT_EQ(stft_magnitude(std::vector<double>(len, 0.0), cfg, hop).rows, placements);
  }
}

TEST(Stft, MatchesNaiveHannDft) {
  FrontendConfig cfg;
  cfg.window_length = 256;
  std::mt19937_64 rng(9);
  std::normal_distribution<double> normal;
  std::vector<double> x(256 + 3 * 100);
  for (double& v : x) v = normal(rng);
  const Matrix m = stft_magnitude(x, cfg, 100);
  ASSERT_EQ(m.rows, 4u);
  for (std::size_t t = 0; t < m.rows; ++t) {
    std::vector<double> frame(256);
    for (std::size_t n = 0; n < 256; ++n) {
      const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / 256.0);
      frame[n] = x[t * 100 + n] * w;
    }
    const auto ref = naive_dft_magnitude(frame);
    for (std::size_t k = 0; k < ref.size(); ++k) EXPECT_NEAR(m(t, k), ref[k], 1e-9 * (1.0 + ref[k]));
  }
}

TEST(Stft, BinCentredSinePeaksAtThatBin) {
  FrontendConfig cfg;
  const double freq = 64.0 * cfg.sample_rate / cfg.window_length;
  std::vector<double> x(4096);
  for (std::size_t n = 0; n < x.size(); ++n) x[n] = std::sin(2.0 * std::numbers::pi * freq * n / cfg.sample_rate);
  const Matrix m = stft_magnitude(x, cfg, 320);
  for (std::size_t t = 0; t < m.rows; ++t) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < m.cols; ++k) {
      if (m(t, k) > m(t, best)) best = k;
    }
    EXPECT_EQ(best, 64u);
  }
}

TEST(Filterbank, ZeroSpectrogramGivesZero) {
  FrontendConfig cfg;
  const auto rep = harmonic_filterbank(Matrix(3, cfg.n_bins()), cfg);
  for (double v : rep.values.data) EXPECT_EQ(v, 0.0);
  EXPECT_DOUBLE_EQ(rep.frame_rate, 50.0);
}

TEST(Filterbank, ImpulseHitsCoveringFiltersOnly) {
  FrontendConfig cfg;
  const Filterbank bank(cfg);
  const double bin_hz = static_cast<double>(cfg.sample_rate) / cfg.window_length;
  for (std::size_t band : {80u, 100u, 120u}) {
    const auto k = static_cast<std::size_t>(std::lround(bank.centers()[band] / bin_hz));
    Matrix spec(1, cfg.n_bins());
    spec(0, k) = 3.0;
    const auto rep = harmonic_filterbank(spec, cfg, bank, cfg.base_hop);
    const double f = k * bin_hz;
    for (std::size_t b = 0; b < static_cast<std::size_t>(cfg.n_bands); ++b) {
      const double lo = b == 0 ? bank.lower_edge(0) : bank.centers()[b - 1];
      const double hi = b + 1 < bank.centers().size() ? bank.centers()[b + 1] : bank.upper_edge(b);
      const double w = triangle(f, lo, bank.centers()[b], hi);
      if (bank.weights()(k, b) == 0.0 && w > 0.0) ADD_FAILURE() << "band " << b;
      EXPECT_NEAR(rep.values(0, b), std::log1p(3.0 * w), 1e-12) << "band " << b;
    }
    EXPECT_NEAR(rep.values(0, band), std::log1p(3.0 * triangle(f, bank.centers()[band - 1], bank.centers()[band], bank.centers()[band + 1])), 1e-12);
    EXPECT_GT(rep.values(0, band), 0.0);
  }
}

TEST(Filterbank, LogSpacedCentresUnitPeakHalfOverlap) {
  FrontendConfig cfg;
  const Filterbank bank(cfg);
  const auto c = bank.centers();
  ASSERT_EQ(c.size(), 128u);
  EXPECT_NEAR(c.front(), cfg.fmin, 1e-9);
  EXPECT_NEAR(c.back(), cfg.fmax, 1e-6);
  for (std::size_t b = 1; b + 1 < c.size(); ++b) {
    EXPECT_NEAR(c[b] * c[b], c[b - 1] * c[b + 1], 1e-6 * c[b] * c[b]);
    EXPECT_DOUBLE_EQ(bank.lower_edge(b), c[b - 1]);
    EXPECT_DOUBLE_EQ(bank.upper_edge(b), c[b + 1]);
  }
  for (std::size_t b = 0; b < c.size(); ++b) {
    double total = 0.0, peak = 0.0;
    for (std::size_t k = 0; k < bank.weights().rows; ++k) {
      total += bank.weights()(k, b);
      peak = std::max(peak, bank.weights()(k, b));
    }
    EXPECT_GT(total, 0.0);
    EXPECT_LE(peak, 1.0);
  }
}

TEST(Filterbank, TrianglesTileTheRange) {
  FrontendConfig cfg;
  const Filterbank bank(cfg);
  const double bin_hz = static_cast<double>(cfg.sample_rate) / cfg.window_length;
  for (std::size_t k = 0; k < bank.weights().rows; ++k) {
    const double f = k * bin_hz;
    if (f < 1000.0 || f > cfg.fmax) continue;
    double total = 0.0;
    for (std::size_t b = 0; b < bank.weights().cols; ++b) total += bank.weights()(k, b);
    EXPECT_NEAR(total, 1.0, 1e-9) << "bin " << k;
  }
}

TEST(Filterbank, ShapeMismatch) {
  FrontendConfig cfg;
  EXPECT_THROW(harmonic_filterbank(Matrix(2, 10), cfg), Error);
}

TEST(Frontend, ConfigValidation) {
  FrontendConfig cfg;
  cfg.base_hop = 2048;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.fmax = 9000;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.n_bands = 1;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(Frontend, FuzzFiniteNonNegative) {
  FrontendConfig cfg;
  const FeatureExtractor fx(cfg);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> amp(-1e3, 1e3);
  for (int trial = 0; trial < 5; ++trial) {
    AudioClip clip;
    clip.sample_rate = 16000;
    for (int n = 0; n < 5000 + trial * 777; ++n) clip.samples.push_back(amp(rng));
    const auto rep = fx.compute(clip, 300 + trial * 13);
    EXPECT_EQ(rep.n_frames(), 1 + clip.samples.size() / (300 + trial * 13));
    for (double v : rep.values.data) {
      EXPECT_TRUE(std::isfinite(v));
      EXPECT_GE(v, 0.0);
    }
    EXPECT_DOUBLE_EQ(rep.frame_rate, 16000.0 / rep.effective_hop);
  }
}

TEST(Frontend, WindowMatchesWholeClip) {
  FrontendConfig cfg;
  const FeatureExtractor fx(cfg);
  const auto [clip, ann] = synth_clicks(120, 4, 4.0, 16000);
  const auto whole = fx.compute(clip, 320);
  const auto part = fx.compute_window(clip.samples, 320 * 50, 60, 320);
  for (std::size_t t = 0; t < 60; ++t) {
    for (std::size_t b = 0; b < part.n_bands(); ++b) {
      EXPECT_NEAR(part.values(t, b), whole.values(t + 50, b), 1e-9);
    }
  }
}

TEST(Frontend, ExportImportRoundTrip) {
  testing::TempDir dir;
  const FeatureExtractor fx(FrontendConfig{});
  const auto [clip, ann] = synth_clicks(100, 3, 2.0, 16000);
  const auto rep = fx.compute(clip, 320);
  export_representation(rep, dir / "f.bin");
  EXPECT_EQ(std::filesystem::file_size(dir / "f.bin"), rep.values.data.size() * 4);
  const auto back = import_representation(dir / "f.bin");
  ASSERT_EQ(back.n_frames(), rep.n_frames());
  ASSERT_EQ(back.n_bands(), rep.n_bands());
  EXPECT_DOUBLE_EQ(back.frame_rate, rep.frame_rate);
  for (std::size_t i = 0; i < rep.values.data.size(); ++i) {
    EXPECT_EQ(back.values.data[i], static_cast<double>(static_cast<float>(rep.values.data[i])));
  }
}

TEST(AugmentHop, ZeroStdIsBaseHop) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(augment_hop(320, rng, 0.0), 320);
}

TEST(AugmentHop, MonteCarloMoments) {
  std::mt19937_64 rng(2);
  double sum = 0.0, sq = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const int hop = augment_hop(320, rng);
    EXPECT_GE(hop, 256);
    EXPECT_LE(hop, 384);
    const double s = hop / 320.0;
    sum += s;
    sq += s * s;
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sq / n - mean * mean);
  EXPECT_NEAR(mean, 1.0, 0.01);
  EXPECT_NEAR(sd, 0.05, 0.005);
}

TEST(AugmentHop, ScaledHopShrinksFramesPerBeat) {
  const int hop = static_cast<int>(std::lround(320 * 1.1));
  EXPECT_EQ(hop, 352);
  const double frame_rate = 16000.0 / hop;
  EXPECT_NEAR(0.5 * frame_rate, 22.727, 1e-3);
  BeatAnnotation ann;
  for (int i = 0; i < 8; ++i) ann.events.push_back({0.5 * i, i % 4 + 1});
  const auto targets = build_targets(ann, 200, frame_rate);
  std::vector<std::size_t> peaks;
  for (std::size_t t = 0; t < 200; ++t) {
    if (targets.labels(t, kBeat) == 1.0 && targets.weights(t, kBeat) == 1.0) peaks.push_back(t);
  }
  ASSERT_EQ(peaks.size(), 8u);
  for (std::size_t i = 1; i < peaks.size(); ++i) {
    const auto gap = peaks[i] - peaks[i - 1];
    EXPECT_TRUE(gap == 22 || gap == 23);
  }
}

TEST(Targets, WideningAroundBeat) {
  BeatAnnotation ann;
  ann.events.push_back({0.20, 2});
  const auto t = build_targets(ann, 30, 50.0);
  EXPECT_EQ(t.labels(10, kBeat), 1.0);
  EXPECT_EQ(t.weights(10, kBeat), 1.0);
  for (std::size_t f : {9u, 11u}) {
    EXPECT_EQ(t.labels(f, kBeat), 1.0);
    EXPECT_EQ(t.weights(f, kBeat), 0.5);
  }
  EXPECT_EQ(t.labels(8, kBeat), 0.0);
  EXPECT_EQ(t.labels(12, kBeat), 0.0);
  EXPECT_EQ(t.labels(10, kDownbeat), 0.0);
  EXPECT_EQ(t.labels(10, kNonBeat), 0.0);
  EXPECT_EQ(t.labels(5, kNonBeat), 1.0);
  EXPECT_EQ(t.weights(5, kNonBeat), 1.0);
}

TEST(Targets, EmptyAnnotation) {
  const auto t = build_targets({}, 20, 50.0);
  for (std::size_t f = 0; f < 20; ++f) {
    EXPECT_EQ(t.labels(f, kNonBeat), 1.0);
    EXPECT_EQ(t.labels(f, kBeat), 0.0);
    EXPECT_EQ(t.labels(f, kDownbeat), 0.0);
  }
}

TEST(Targets, DownbeatWidensInBothChannels) {
  BeatAnnotation ann;
  ann.events.push_back({0.5, 1});
  const auto t = build_targets(ann, 40, 50.0);
  for (std::size_t f = 0; f < 40; ++f) {
    EXPECT_EQ(t.labels(f, kBeat), t.labels(f, kDownbeat));
    EXPECT_EQ(t.weights(f, kBeat), t.weights(f, kDownbeat));
  }
}

TEST(Targets, FullWeightWinsOverNeighbour) {
  BeatAnnotation ann;
  ann.events.push_back({0.20, 0});
  ann.events.push_back({0.24, 0});
  const auto t = build_targets(ann, 30, 50.0);
  EXPECT_EQ(t.weights(10, kBeat), 1.0);
  EXPECT_EQ(t.weights(11, kBeat), 0.5);
  EXPECT_EQ(t.weights(12, kBeat), 1.0);
}

TEST(Targets, EventOutOfRange) {
  BeatAnnotation ann;
  ann.events.push_back({5.0, 1});
  try {
    build_targets(ann, 100, 50.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEventOutOfRange);
  }
}

TEST(Targets, BeatDominatesDownbeatRandom) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    BeatAnnotation ann;
    double time = 0.0;
    while (true) {
      time += 0.02 + (rng() % 100) / 200.0;
      if (time >= 9.9) break;
      ann.events.push_back({time, static_cast<int>(rng() % 4)});
    }
    const auto t = build_targets(ann, 500, 50.0);
    for (std::size_t f = 0; f < 500; ++f) {
      EXPECT_GE(t.labels(f, kBeat), t.labels(f, kDownbeat));
      EXPECT_EQ(t.labels(f, kNonBeat), 1.0 - t.labels(f, kBeat));
    }
  }
}

}  // namespace
}  // namespace beatforge
