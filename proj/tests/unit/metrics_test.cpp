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
#include "beatforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "beatforge/audio_io.hpp"
#include "beatforge/errors.hpp"
#include "reference_metrics.hpp"
#include "test_util.hpp"

namespace beatforge {
namespace {

using testing::LogCapture;
using testing::TempDir;

MetricConfig no_skip() {
  MetricConfig cfg;
  cfg.min_beat_time = 0.0;
  return cfg;
}

std::vector<double> grid(double start, double period, std::size_t n) {
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(start + period * static_cast<double>(i));
  return out;
}

std::vector<double> random_reference(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> period(0.3, 1.0);
  std::uniform_real_distribution<double> jitter(-0.01, 0.01);
  std::uniform_int_distribution<std::size_t> count(2, 40);
  const double p = period(rng);
  std::vector<double> ref;
  double t = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  for (std::size_t i = 0, n = count(rng); i < n; ++i) {
    ref.push_back(t + jitter(rng));
    t += p;
  }
  std::sort(ref.begin(), ref.end());
  return ref;
}

std::vector<double> perturb(const std::vector<double>& ref, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double period = ref.size() > 1 ? ref[1] - ref[0] : 0.5;
  std::vector<double> est;
  const int mode = std::uniform_int_distribution<int>(0, 5)(rng);
  const double noise = 0.12 * period * u(rng);
  for (std::size_t i = 0; i < ref.size(); ++i) {
    if (u(rng) < 0.1) continue;
    double t = ref[i] + noise * (2.0 * u(rng) - 1.0);
    if (mode == 1) t += 0.5 * period;
    if (mode == 2 && i % 2 == 1) continue;
    est.push_back(t);
    if (mode == 3 && i + 1 < ref.size()) est.push_back(0.5 * (ref[i] + ref[i + 1]));
    if (mode == 4 && u(rng) < 0.2) est.push_back(t + period * u(rng));
  }
  if (mode == 5) {
    est.clear();
    const std::size_t n = std::uniform_int_distribution<std::size_t>(0, 30)(rng);
    for (std::size_t i = 0; i < n; ++i) est.push_back(20.0 * u(rng));
  }
  std::sort(est.begin(), est.end());
  return est;
}

TEST(FMeasure, IdentityIsOne) {
  const auto ref = grid(0.3, 0.5, 12);
  EXPECT_EQ(f_measure(ref, ref, 0.07), 1.0);
}

TEST(FMeasure, HandMatchedExampleIsHalf) {
  const std::vector<double> est{1.00, 2.00};
  const std::vector<double> ref{1.05, 2.50};
  EXPECT_EQ(f_measure(est, ref, 0.07), 0.5);
}

TEST(FMeasure, OneToOneConstraint) {
  const std::vector<double> est{1.0};
  const std::vector<double> ref{0.96, 1.04};
  EXPECT_EQ(f_measure(est, ref, 0.07), 2.0 / 3.0);
}

TEST(FMeasure, EmptyCases) {
  const std::vector<double> none;
  const std::vector<double> some{1.0};
  EXPECT_EQ(f_measure(none, none, 0.07), 1.0);
  EXPECT_EQ(f_measure(none, some, 0.07), 0.0);
  EXPECT_EQ(f_measure(some, none, 0.07), 0.0);
}

TEST(FMeasure, SymmetricUnderSwap) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 500; ++i) {
    const auto ref = random_reference(rng);
    const auto est = perturb(ref, rng);
    ASSERT_EQ(f_measure(est, ref, 0.07), f_measure(ref, est, 0.07)) << "pair " << i;
  }
}

TEST(FMeasure, MatchesMaximumMatchingReference) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 1000; ++i) {
    const auto ref = random_reference(rng);
    const auto est = perturb(ref, rng);
    ASSERT_NEAR(f_measure(est, ref, 0.07), testing::reference_f_measure(est, ref, 0.07), 1e-9)
        << "pair " << i;
  }
}

TEST(Continuity, IdentityIsOne) {
  const auto ref = grid(0.2, 0.5, 20);
  const ContinuityScores s = continuity_scores(ref, ref, no_skip());
  EXPECT_EQ(s.cmlt, 1.0);
  EXPECT_EQ(s.amlt, 1.0);
}

TEST(Continuity, DoubleTempoCountsOnlyAtAllowedLevels) {
  const auto ref = grid(0.0, 0.5, 20);
  const auto est = grid(0.0, 0.25, 39);
  const ContinuityScores s = continuity_scores(est, ref, no_skip());
  EXPECT_EQ(s.cmlt, 0.0);
  EXPECT_EQ(s.amlt, 1.0);
}

TEST(Continuity, ThirtyPercentOffsetFailsEverywhere) {
  const auto ref = grid(0.0, 0.5, 20);
  const auto est = grid(0.15, 0.5, 20);
  const ContinuityScores s = continuity_scores(est, ref, no_skip());
  EXPECT_EQ(s.cmlt, 0.0);
  EXPECT_EQ(s.amlt, 0.0);
}

TEST(Continuity, OffbeatCountsForAmlOnly) {
  const auto ref = grid(0.0, 0.5, 20);
  const auto est = grid(0.25, 0.5, 19);
  const ContinuityScores s = continuity_scores(est, ref, no_skip());
  EXPECT_EQ(s.cmlt, 0.0);
  EXPECT_EQ(s.amlt, 1.0);
}

TEST(Continuity, InsufficientReferenceThrows) {
  const std::vector<double> ref{1.0};
  const std::vector<double> est{1.0, 2.0};
  try {
    continuity_scores(est, ref, no_skip());
    FAIL() << "expected InsufficientReference";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientReference);
  }
}

TEST(Continuity, MatchesDefinitionReference) {
  std::mt19937_64 rng(14);
  const MetricConfig cfg = no_skip();
  for (int i = 0; i < 1000; ++i) {
    const auto ref = random_reference(rng);
    const auto est = perturb(ref, rng);
    const ContinuityScores s = continuity_scores(est, ref, cfg);
    const auto r = testing::reference_continuity(est, ref, cfg.continuity_phase_tol,
                                                 cfg.continuity_period_tol);
    ASSERT_NEAR(s.cmlt, r.cmlt, 1e-9) << "pair " << i;
    ASSERT_NEAR(s.amlt, r.amlt, 1e-9) << "pair " << i;
  }
}

TEST(Continuity, AmlNeverBelowCml) {
  std::mt19937_64 rng(15);
  for (int i = 0; i < 1000; ++i) {
    const auto ref = random_reference(rng);
    const auto est = perturb(ref, rng);
    const ContinuityScores s = continuity_scores(est, ref, no_skip());
    ASSERT_GE(s.amlt, s.cmlt);
    ASSERT_GE(s.cmlt, 0.0);
    ASSERT_LE(s.amlt, 1.0);
  }
}

TEST(MetricalVariations, ContainsExpectedLevels) {
  const auto ref = grid(0.0, 1.0, 7);
  const auto variants = metrical_variations(ref);
  EXPECT_EQ(variants.front(), ref);
  auto has = [&](const std::vector<double>& v) {
    return std::any_of(variants.begin(), variants.end(), [&](const auto& x) {
      if (x.size() != v.size()) return false;
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (std::abs(x[i] - v[i]) > 1e-12) return false;
      }
      return true;
    });
  };
  EXPECT_TRUE(has(grid(0.5, 1.0, 6)));
  EXPECT_TRUE(has(grid(0.0, 0.5, 13)));
  EXPECT_TRUE(has(grid(0.0, 2.0, 4)));
  EXPECT_TRUE(has(grid(1.0, 2.0, 3)));
  EXPECT_TRUE(has(grid(0.0, 1.0 / 3.0, 19)));
  EXPECT_TRUE(has(grid(0.0, 3.0, 3)));
  EXPECT_TRUE(has(grid(2.0, 3.0, 2)));
}

TEST(EvaluateSequences, SkipInIgnoresEarlyEvents) {
  std::mt19937_64 rng(16);
  std::uniform_real_distribution<double> early(0.0, 4.99);
  const MetricConfig cfg;
  for (int i = 0; i < 200; ++i) {
    auto ref = random_reference(rng);
    for (auto& t : ref) t += 5.0;
    const auto est = perturb(ref, rng);
    const EvalReport base = evaluate_sequences(est, ref, cfg);
    auto est2 = est;
    auto ref2 = ref;
    for (int k = 0; k < 3; ++k) {
      est2.push_back(early(rng));
      ref2.push_back(early(rng));
    }
    std::sort(est2.begin(), est2.end());
    std::sort(ref2.begin(), ref2.end());
    const EvalReport more = evaluate_sequences(est2, ref2, cfg);
    ASSERT_EQ(base.f1, more.f1);
    ASSERT_EQ(base.cmlt, more.cmlt);
    ASSERT_EQ(base.amlt, more.amlt);
  }
}

TEST(EvaluateSequences, ShortReferenceMarksContinuityInvalid) {
  const std::vector<double> ref{6.0};
  const std::vector<double> est{6.0};
  const EvalReport r = evaluate_sequences(est, ref, MetricConfig{});
  EXPECT_EQ(r.f1, 1.0);
  EXPECT_FALSE(r.continuity_valid);
}

TEST(EvaluateSequences, GapIsAmlMinusCml) {
  const auto ref = grid(5.0, 0.5, 20);
  const auto est = grid(5.0, 0.25, 39);
  const EvalReport r = evaluate_sequences(est, ref, MetricConfig{});
  EXPECT_EQ(r.aml_cml_gap(), r.amlt - r.cmlt);
  EXPECT_EQ(r.aml_cml_gap(), 1.0);
}

TEST(Aggregate, UnweightedMean) {
  EvalReport a;
  a.f1 = 1.0;
  EvalReport b;
  b.f1 = 0.0;
  const std::vector<EvalReport> two{a, b};
  EXPECT_EQ(aggregate(two).f1, 0.5);
  const std::vector<EvalReport> one{a};
  EXPECT_EQ(aggregate(one).f1, 1.0);
}

TEST(MetricConfig, RejectsNonPositiveTolerance) {
  MetricConfig cfg;
  cfg.f_measure_tolerance = 0.0;
  EXPECT_THROW(cfg.validate(), Error);
}

BeatAnnotation beats_at(const std::vector<double>& times) {
  BeatAnnotation ann;
  for (std::size_t i = 0; i < times.size(); ++i) {
    ann.events.push_back({times[i], static_cast<int>(i % 4) + 1});
  }
  return ann;
}

TEST(EvaluateDataset, MeanOverFilesAndMissingPairs) {
  TempDir est_dir;
  TempDir ref_dir;
  const auto ref = grid(5.0, 0.5, 20);
  write_annotation(ref_dir.path() / "a.beats", beats_at(ref));
  write_annotation(ref_dir.path() / "b.beats", beats_at(ref));
  write_annotation(ref_dir.path() / "c.beats", beats_at(ref));
  write_annotation(est_dir.path() / "a.beats", beats_at(ref));
  write_annotation(est_dir.path() / "b.beats", beats_at(grid(5.2, 0.5, 20)));
  LogCapture capture;
  const DatasetReport report = evaluate_dataset(est_dir.path(), ref_dir.path(), MetricConfig{});
  ASSERT_EQ(report.files.size(), 2u);
  EXPECT_EQ(report.beat.f1, 0.5);
  EXPECT_EQ(report.missing, (std::vector<std::string>{"c"}));
  EXPECT_TRUE(capture.contains("MissingPair"));
  const auto j = report_to_json(report);
  EXPECT_EQ(j["files"].size(), 2u);
  EXPECT_EQ(j["aggregate"]["beat"]["f1"].get<double>(), 0.5);
  const std::string table = report_to_table(report, false);
  EXPECT_NE(table.find("a"), std::string::npos);
}

TEST(EvaluateDataset, SingleFileAggregateEqualsFile) {
  TempDir est_dir;
  TempDir ref_dir;
  write_annotation(ref_dir.path() / "x.beats", beats_at(grid(5.0, 0.5, 20)));
  write_annotation(est_dir.path() / "x.beats", beats_at(grid(5.01, 0.5, 18)));
  const DatasetReport report = evaluate_dataset(est_dir.path(), ref_dir.path(), MetricConfig{});
  ASSERT_EQ(report.files.size(), 1u);
  EXPECT_EQ(report.beat.f1, report.files[0].beat.f1);
  EXPECT_EQ(report.beat.cmlt, report.files[0].beat.cmlt);
  EXPECT_EQ(report.downbeat.f1, report.files[0].downbeat.f1);
}

TEST(EvaluateDataset, EmptyDirectoriesThrowIo) {
  TempDir est_dir;
  TempDir ref_dir;
  try {
    evaluate_dataset(est_dir.path(), ref_dir.path(), MetricConfig{});
    FAIL() << "expected an I/O error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

}  // namespace
}  // namespace beatforge
