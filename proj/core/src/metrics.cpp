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
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "beatforge/audio_io.hpp"
#include "beatforge/errors.hpp"
#include "beatforge/json_util.hpp"
#include "beatforge/log.hpp"

namespace beatforge {

namespace {

template <typename C, typename V>
void metric_fields(C& c, V&& visit) {
  visit("f_measure_tolerance", c.f_measure_tolerance);
  visit("continuity_phase_tol", c.continuity_phase_tol);
  visit("continuity_period_tol", c.continuity_period_tol);
  visit("min_beat_time", c.min_beat_time);
}

std::vector<double> skip_in(std::span<const double> times, double start) {
  std::vector<double> out;
  for (double t : times) {
    if (t >= start) out.push_back(t);
  }
  return out;
}

std::size_t nearest_index(std::span<const double> ref, double t) {
  auto it = std::lower_bound(ref.begin(), ref.end(), t);
  if (it == ref.begin()) return 0;
  if (it == ref.end()) return ref.size() - 1;
  const std::size_t hi = static_cast<std::size_t>(it - ref.begin());
  return std::abs(t - ref[hi - 1]) <= std::abs(t - ref[hi]) ? hi - 1 : hi;
}

double continuity_at_level(std::span<const double> est, std::span<const double> ref,
                           const MetricConfig& cfg) {
  if (est.empty()) return 0.0;
  const std::size_t n = est.size();
  std::vector<char> in_phase(n);
  std::vector<std::size_t> nearest(n);
  std::vector<double> interval(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = nearest_index(ref, est[i]);
    nearest[i] = j;
    interval[i] = j == 0 ? ref[1] - ref[0] : ref[j] - ref[j - 1];
    in_phase[i] = std::abs(est[i] - ref[j]) <= cfg.continuity_phase_tol * interval[i];
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!in_phase[i]) continue;
    double est_interval = 0.0;
    if (i == 0) {
      if (n < 2) continue;
      est_interval = est[1] - est[0];
    } else {
      if (!in_phase[i - 1]) continue;
      est_interval = est[i] - est[i - 1];
    }
    if (std::abs(est_interval - interval[i]) <= cfg.continuity_period_tol * interval[i]) {
      ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(std::max(n, ref.size()));
}

std::vector<double> every_nth(std::span<const double> ref, std::size_t step, std::size_t start) {
  std::vector<double> out;
  for (std::size_t i = start; i < ref.size(); i += step) out.push_back(ref[i]);
  return out;
}

std::vector<double> subdivide(std::span<const double> ref, int parts, bool keep_beats) {
  std::vector<double> out;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    if (keep_beats) out.push_back(ref[i]);
    if (i + 1 == ref.size()) break;
    const double d = ref[i + 1] - ref[i];
    for (int p = 1; p < parts; ++p) out.push_back(ref[i] + d * p / parts);
  }
  return out;
}

std::map<std::string, std::filesystem::path> annotation_files(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::kIo, "not a directory: " + dir.string());
  }
  std::map<std::string, std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".beats") {
      files[entry.path().stem().string()] = entry.path();
    }
  }
  return files;
}

nlohmann::json eval_json(const EvalReport& r) {
  return {{"f1", r.f1},
          {"cmlt", r.cmlt},
          {"amlt", r.amlt},
          {"aml_cml_gap", r.aml_cml_gap()},
          {"continuity_valid", r.continuity_valid}};
}

}  // namespace

void MetricConfig::validate() const {
  if (!(f_measure_tolerance > 0.0) || !(continuity_phase_tol > 0.0) ||
      !(continuity_period_tol > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "metric tolerances must be positive");
  }
}

void to_json(nlohmann::json& j, const MetricConfig& cfg) {
  json_util::write_fields(j, cfg, [](auto& c, auto&& v) { metric_fields(c, v); });
}

void from_json(const nlohmann::json& j, MetricConfig& cfg) {
  json_util::read_fields(j, cfg, [](auto& c, auto&& v) { metric_fields(c, v); }, "metrics");
}

double f_measure(std::span<const double> estimated, std::span<const double> reference,
                 double tolerance) {
  if (estimated.empty() && reference.empty()) return 1.0;
  if (estimated.empty() || reference.empty()) return 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t hits = 0;
  while (i < estimated.size() && j < reference.size()) {
    const double e = estimated[i];
    const double r = reference[j];
    if (std::abs(e - r) <= tolerance) {
      ++hits;
      ++i;
      ++j;
    } else if (e < r) {
      ++i;
    } else {
      ++j;
    }
  }
  const double fp = static_cast<double>(estimated.size() - hits);
  const double fn = static_cast<double>(reference.size() - hits);
  return 2.0 * hits / (2.0 * hits + fp + fn);
}

std::vector<std::vector<double>> metrical_variations(std::span<const double> reference) {
  std::vector<std::vector<double>> variants;
  variants.emplace_back(reference.begin(), reference.end());
  variants.push_back(subdivide(reference, 2, false));  // off-beat
  variants.push_back(subdivide(reference, 2, true));   // double
  variants.push_back(every_nth(reference, 2, 0));      // half, odd beats
  variants.push_back(every_nth(reference, 2, 1));      // half, even beats
  variants.push_back(subdivide(reference, 3, true));   // triple
  for (std::size_t phase = 0; phase < 3; ++phase) variants.push_back(every_nth(reference, 3, phase));
  std::erase_if(variants, [](const auto& v) { return v.size() < 2; });
  return variants;
}

ContinuityScores continuity_scores(std::span<const double> estimated,
                                   std::span<const double> reference, const MetricConfig& cfg) {
  if (reference.size() < 2) {
    throw Error(ErrorCode::kInsufficientReference,
                "continuity needs at least 2 reference events, got " +
                    std::to_string(reference.size()));
  }
  ContinuityScores scores;
  scores.cmlt = continuity_at_level(estimated, reference, cfg);
  scores.amlt = scores.cmlt;
  for (const auto& variant : metrical_variations(reference)) {
    scores.amlt = std::max(scores.amlt, continuity_at_level(estimated, variant, cfg));
  }
  return scores;
}

EvalReport evaluate_sequences(std::span<const double> estimated,
                              std::span<const double> reference, const MetricConfig& cfg) {
  const auto est = skip_in(estimated, cfg.min_beat_time);
  const auto ref = skip_in(reference, cfg.min_beat_time);
  EvalReport report;
  report.f1 = f_measure(est, ref, cfg.f_measure_tolerance);
  if (ref.size() < 2) {
    report.continuity_valid = false;
    return report;
  }
  const ContinuityScores c = continuity_scores(est, ref, cfg);
  report.cmlt = c.cmlt;
  report.amlt = c.amlt;
  return report;
}

EvalReport aggregate(std::span<const EvalReport> reports) {
  EvalReport mean;
  if (reports.empty()) return mean;
  std::size_t valid = 0;
  for (const auto& r : reports) {
    mean.f1 += r.f1;
    if (r.continuity_valid) {
      mean.cmlt += r.cmlt;
      mean.amlt += r.amlt;
      ++valid;
    }
  }
  mean.f1 /= static_cast<double>(reports.size());
  if (valid > 0) {
    mean.cmlt /= static_cast<double>(valid);
    mean.amlt /= static_cast<double>(valid);
  }
  mean.continuity_valid = valid > 0;
  return mean;
}

DatasetReport evaluate_dataset(const std::filesystem::path& estimate_dir,
                               const std::filesystem::path& reference_dir,
                               const MetricConfig& cfg) {
  cfg.validate();
  const auto estimates = annotation_files(estimate_dir);
  const auto references = annotation_files(reference_dir);
  if (estimates.empty() && references.empty()) {
    throw Error(ErrorCode::kIo, "no .beats files in " + estimate_dir.string() + " or " +
                                    reference_dir.string());
  }
  DatasetReport report;
  std::vector<EvalReport> beats;
  std::vector<EvalReport> downbeats;
  std::set<std::string> names;
  for (const auto& [name, path] : estimates) names.insert(name);
  for (const auto& [name, path] : references) names.insert(name);
  for (const auto& name : names) {
    auto e = estimates.find(name);
    auto r = references.find(name);
    if (e == estimates.end() || r == references.end()) {
      log::warn("MissingPair: " + name + " has no " +
                (e == estimates.end() ? "estimate" : "reference") + " file; skipped");
      report.missing.push_back(name);
      continue;
    }
    const BeatAnnotation est = parse_annotation(e->second);
    const BeatAnnotation ref = parse_annotation(r->second);
    FileReport file{name,
                    evaluate_sequences(est.beat_times(), ref.beat_times(), cfg),
                    evaluate_sequences(est.downbeat_times(), ref.downbeat_times(), cfg)};
    beats.push_back(file.beat);
    downbeats.push_back(file.downbeat);
    report.files.push_back(std::move(file));
  }
  report.beat = aggregate(beats);
  report.downbeat = aggregate(downbeats);
  return report;
}

nlohmann::json report_to_json(const DatasetReport& report) {
  nlohmann::json files = nlohmann::json::array();
  for (const auto& f : report.files) {
    files.push_back({{"name", f.name}, {"beat", eval_json(f.beat)},
                     {"downbeat", eval_json(f.downbeat)}});
  }
  return {{"files", files},
          {"aggregate", {{"beat", eval_json(report.beat)}, {"downbeat", eval_json(report.downbeat)}}},
          {"missing", report.missing}};
}

std::string report_to_table(const DatasetReport& report, bool downbeats) {
  std::size_t width = 4;
  for (const auto& f : report.files) width = std::max(width, f.name.size());
  width = std::max<std::size_t>(width, 4) + 2;
  std::ostringstream out;
  char line[256];
  auto row = [&](const std::string& name, const EvalReport& r) {
    out << name << std::string(width - name.size(), ' ');
    if (r.continuity_valid) {
      std::snprintf(line, sizeof(line), "%7.3f %7.3f %7.3f %10.3f\n", r.f1, r.cmlt, r.amlt,
                    r.aml_cml_gap());
    } else {
      std::snprintf(line, sizeof(line), "%7.3f %7s %7s %10s\n", r.f1, "-", "-", "-");
    }
    out << line;
  };
  std::snprintf(line, sizeof(line), "%7s %7s %7s %10s\n", "F1", "CMLt", "AMLt", "AMLt-CMLt");
  out << "file" << std::string(width - 4, ' ') << line;
  for (const auto& f : report.files) row(f.name, downbeats ? f.downbeat : f.beat);
  row("mean", downbeats ? report.downbeat : report.beat);
  return out.str();
}

}  // namespace beatforge
