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

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace beatforge {

struct MetricConfig {
  double f_measure_tolerance = 0.070;
  double continuity_phase_tol = 0.175;
  double continuity_period_tol = 0.175;
  /// Events before this time (s) are dropped from both sequences.
  double min_beat_time = 5.0;

  void validate() const;
};

void to_json(nlohmann::json& j, const MetricConfig& cfg);
void from_json(const nlohmann::json& j, MetricConfig& cfg);

struct EvalReport {
  double f1 = 0.0;
  double cmlt = 0.0;
  double amlt = 0.0;
  /// False when the reference had fewer than two events after skip-in, so
  /// only f1 is meaningful.
  bool continuity_valid = true;

  double aml_cml_gap() const { return amlt - cmlt; }
};

/// F-measure under greedy one-to-one matching in time order within +-tol.
/// Both lists must be sorted. Both empty -> 1; exactly one empty -> 0.
double f_measure(std::span<const double> estimated, std::span<const double> reference,
                 double tolerance);

struct ContinuityScores {
  double cmlt = 0.0;
  double amlt = 0.0;
};

/// Continuity scores with total (not longest-segment) counting. A beat is
/// correct when it lies within phase_tol * IAI of its nearest reference beat,
/// its inter-beat interval is within period_tol * IAI of that reference's
/// interval, and its predecessor is also in phase. The first beat is judged
/// on the interval to its successor. Scores divide by max(#est, #ref).
/// Throws InsufficientReference when `reference` has fewer than 2 events.
ContinuityScores continuity_scores(std::span<const double> estimated,
                                   std::span<const double> reference, const MetricConfig& cfg);

/// Reference sequences accepted by AMLt: original, off-beat, double, both
/// half-tempo phases, triple and the three third-tempo phases. Variants with
/// fewer than two events are omitted.
std::vector<std::vector<double>> metrical_variations(std::span<const double> reference);

/// Applies the skip-in to both lists, then scores them.
EvalReport evaluate_sequences(std::span<const double> estimated,
                              std::span<const double> reference, const MetricConfig& cfg);

struct FileReport {
  std::string name;
  EvalReport beat;
  EvalReport downbeat;
};

struct DatasetReport {
  std::vector<FileReport> files;
  EvalReport beat;      // unweighted means over files
  EvalReport downbeat;
  /// Names present in only one of the two directories.
  std::vector<std::string> missing;
};

/// Pairs `<name>.beats` files across the two directories by name and
/// evaluates every pair. Unpaired files are reported in `missing` and
/// skipped.
DatasetReport evaluate_dataset(const std::filesystem::path& estimate_dir,
                               const std::filesystem::path& reference_dir,
                               const MetricConfig& cfg);

/// Per-file mean of the given reports; continuity means use only files with
/// a valid reference.
EvalReport aggregate(std::span<const EvalReport> reports);

nlohmann::json report_to_json(const DatasetReport& report);
/// Aligned text table with F1, CMLt, AMLt and AMLt - CMLt columns.
std::string report_to_table(const DatasetReport& report, bool downbeats);

}  // namespace beatforge
