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
#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "beatforge/corpus.hpp"
#include "beatforge/dbn.hpp"
#include "beatforge/frontend.hpp"
#include "beatforge/inference.hpp"
#include "beatforge/log.hpp"
#include "beatforge/matrix.hpp"
#include "beatforge/metrics.hpp"
#include "beatforge/models/fusion.hpp"
#include "beatforge/models/spectnt.hpp"
#include "beatforge/models/tcn.hpp"
#include "beatforge/nn/attention.hpp"
#include "beatforge/nn/conv.hpp"
#include "beatforge/nn/ops.hpp"
#include "beatforge/training.hpp"
#include "beatforge_cli/cli.hpp"
#include "gradcheck.hpp"
#include "reference_metrics.hpp"
#include "test_util.hpp"

namespace beatforge {
namespace {

using nn::Tensor;
using testing::grad_check;
using testing::random_tensor;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

std::vector<Tensor> param_tensors(const nn::ParamStore& store) {
  std::vector<Tensor> out;
  for (const auto& p : store.parameters()) out.push_back(p.tensor);
  return out;
}

models::TcnConfig toy_tcn() {
  models::TcnConfig cfg;
  cfg.n_bands = 32;
  cfg.frontend_filters = 8;
  cfg.frontend_kernels = {{3, 3}, {3, 3}, {4, 3}};
  cfg.pool_sizes = {3, 2, 1};
  cfg.n_layers = 8;
  cfg.channels = 12;
  cfg.input_seconds = 6.0;
  return cfg;
}

models::SpecTntConfig toy_spectnt() {
  models::SpecTntConfig cfg;
  cfg.n_bands = 32;
  cfg.n_blocks = 2;
  cfg.spectral_dim = 16;
  cfg.spectral_heads = 2;
  cfg.temporal_dim = 32;
  cfg.temporal_heads = 4;
  cfg.frontend_channels = 16;
  cfg.input_seconds = 6.0;
  return cfg;
}

models::FusionConfig tiny_fusion() {
  models::FusionConfig cfg;
  cfg.spectnt.n_bands = 16;
  cfg.spectnt.spectral_dim = 8;
  cfg.spectnt.spectral_heads = 2;
  cfg.spectnt.temporal_dim = 16;
  cfg.spectnt.temporal_heads = 4;
  cfg.spectnt.frontend_channels = 4;
  cfg.spectnt.dropout = 0.0;
  cfg.tcn.n_layers = 2;
  cfg.tcn.channels = 4;
  cfg.tcn.dropout = 0.0;
  cfg.front_blocks = 1;
  cfg.tail_blocks = 1;
  cfg.chunk_seconds = 0.2;
  cfg.n_chunks = 4;
  cfg.input_seconds = 0.8;
  cfg.enforce_duration = false;
  return cfg;
}

Outcome ac1_param_counts() {
  struct Row {
    const char* name;
    std::size_t count;
    std::size_t target;
  };
  const std::vector<Row> rows{
      {"tcn", models::TcnModel(models::TcnConfig{}).param_count(), 86679},
      {"spectnt", models::SpecTntModel(models::SpecTntConfig{}).param_count(), 4637392},
      {"fusion", models::FusionModel(models::FusionConfig{}).param_count(), 4692896}};
  Outcome o{true, ""};
  for (const auto& r : rows) {
    const double rel = (static_cast<double>(r.count) - r.target) / r.target;
    o.pass &= std::abs(rel) <= 0.10;
    o.detail += fmt("%s %zu (%+.1f%%) ", r.name, r.count, 100.0 * rel);
  }
  return o;
}

Outcome ac2_gradients() {
  using Fn = std::function<Tensor(const std::vector<Tensor>&)>;
  struct Case {
    std::string name;
    Fn f;
    std::vector<Tensor> inputs;
  };
  std::mt19937_64 rng(2);
  std::vector<Case> cases;
  auto rt = [&](nn::Shape s) { return random_tensor(s, rng); };
  cases.push_back({"add", [](const auto& in) { return nn::add(in[0], in[1]); }, {rt({3, 5}), rt({3, 5})}});
  cases.push_back({"add_trailing", [](const auto& in) { return nn::add_trailing(in[0], in[1]); },
                   {rt({2, 3, 4}), rt({3, 4})}});
  cases.push_back({"mul", [](const auto& in) { return nn::mul(in[0], in[1]); }, {rt({3, 5}), rt({3, 5})}});
  cases.push_back({"scale", [](const auto& in) { return nn::scale(in[0], -1.3); }, {rt({3, 5})}});
  cases.push_back({"sum", [](const auto& in) { return nn::sum(in[0]); }, {rt({4, 3})}});
  cases.push_back({"mean", [](const auto& in) { return nn::mean(in[0]); }, {rt({4, 3})}});
  cases.push_back({"matmul", [](const auto& in) { return nn::matmul(in[0], in[1]); }, {rt({3, 4}), rt({4, 2})}});
  cases.push_back({"linear", [](const auto& in) { return nn::linear(in[0], in[1], in[2]); },
                   {rt({3, 3}), rt({3, 4}), rt({4})}});
  cases.push_back({"reshape", [](const auto& in) { return nn::reshape(in[0], {6, 4}); }, {rt({2, 3, 4})}});
  cases.push_back({"permute", [](const auto& in) { return nn::permute(in[0], {2, 0, 1}); }, {rt({2, 3, 4})}});
  cases.push_back({"concat", [](const auto& in) { return nn::concat({in[0], in[1]}, 1); },
                   {rt({2, 3, 4}), rt({2, 2, 4})}});
  cases.push_back({"slice", [](const auto& in) { return nn::slice(in[0], 1, 1, 2); }, {rt({2, 4, 3})}});
  cases.push_back({"repeat_rows", [](const auto& in) { return nn::repeat_rows(in[0], 5); }, {rt({3})}});
  cases.push_back({"relu", [](const auto& in) { return nn::relu(in[0]); }, {rt({4, 5})}});
  cases.push_back({"elu", [](const auto& in) { return nn::elu(in[0]); }, {rt({4, 5})}});
  cases.push_back({"gelu", [](const auto& in) { return nn::gelu(in[0]); }, {rt({4, 5})}});
  cases.push_back({"sigmoid", [](const auto& in) { return nn::sigmoid(in[0]); }, {rt({4, 5})}});
  Tensor positive = rt({4, 5});
  for (double& v : positive.data()) v = std::abs(v) + 0.1;
  cases.push_back({"log1p", [](const auto& in) { return nn::log1p(in[0]); }, {positive}});
  cases.push_back({"softmax", [](const auto& in) { return nn::softmax(in[0]); }, {rt({4, 5})}});
  cases.push_back({"layer_norm", [](const auto& in) { return nn::layer_norm(in[0], in[1], in[2]); },
                   {rt({3, 6}), rt({6}), rt({6})}});
  cases.push_back({"batch_norm", [](const auto& in) { return nn::batch_norm(in[0], in[1], in[2]); },
                   {rt({3, 4, 5}), rt({3}), rt({3})}});
  cases.push_back({"dropout",
                   [](const auto& in) {
                     std::mt19937_64 mask(42);
                     return nn::dropout(in[0], 0.3, mask);
                   },
                   {rt({6, 6})}});
  std::vector<double> labels(18), weights(18);
  for (std::size_t i = 0; i < 18; ++i) {
    labels[i] = i % 3 == 0 ? 1.0 : 0.0;
    weights[i] = i % 2 == 0 ? 1.0 : 0.5;
  }
  cases.push_back({"weighted_bce",
                   [labels, weights](const auto& in) {
                     return nn::weighted_bce_with_logits(in[0], labels, weights);
                   },
                   {rt({6, 3})}});
  cases.push_back({"conv1d", [](const auto& in) { return nn::conv1d(in[0], in[1], in[2], 2); },
                   {rt({3, 12}), rt({4, 3, 3}), rt({4})}});
  cases.push_back({"conv2d", [](const auto& in) { return nn::conv2d(in[0], in[1], in[2], {2, 1, 1, 1}); },
                   {rt({2, 7, 5}), rt({3, 2, 3, 3}), rt({3})}});
  cases.push_back({"max_pool_freq", [](const auto& in) { return nn::max_pool_freq(in[0], 3); },
                   {rt({2, 8, 3})}});
  cases.push_back({"attention",
                   [](const auto& in) { return nn::scaled_dot_product_attention(in[0], in[1], in[2], 2); },
                   {rt({2, 5, 4}), rt({2, 5, 4}), rt({2, 5, 4})}});

  models::TcnConfig tcn_cfg = toy_tcn();
  tcn_cfg.n_layers = 3;
  tcn_cfg.channels = 5;
  tcn_cfg.frontend_filters = 4;
  tcn_cfg.dropout = 0.0;
  tcn_cfg.enforce_duration = false;
  auto tcn = std::make_shared<models::TcnModel>(tcn_cfg, 3);
  const Tensor tcn_x = rt({12, 32});
  cases.push_back({"model:tcn", [tcn, tcn_x](const auto&) { return tcn->forward(tcn_x, {}).branch_logits[0]; },
                   param_tensors(tcn->params())});

  models::SpecTntConfig st_cfg;
  st_cfg.n_bands = 16;
  st_cfg.n_blocks = 1;
  st_cfg.spectral_dim = 8;
  st_cfg.spectral_heads = 2;
  st_cfg.temporal_dim = 16;
  st_cfg.temporal_heads = 4;
  st_cfg.frontend_channels = 4;
  st_cfg.dropout = 0.0;
  st_cfg.enforce_duration = false;
  auto spectnt = std::make_shared<models::SpecTntModel>(st_cfg, 4);
  const Tensor st_x = rt({6, 16});
  cases.push_back({"model:spectnt",
                   [spectnt, st_x](const auto&) { return spectnt->forward(st_x, {}).branch_logits[0]; },
                   param_tensors(spectnt->params())});

  auto fusion = std::make_shared<models::FusionModel>(tiny_fusion(), 5);
  const Tensor fu_x = rt({8, 16});
  cases.push_back({"model:fusion",
                   [fusion, fu_x](const auto&) {
                     return nn::concat(fusion->forward(fu_x, {}).branch_logits, 0);
                   },
                   param_tensors(fusion->params())});

  Outcome o{true, ""};
  double worst = 0.0;
  std::string worst_name;
  for (auto& c : cases) {
    const std::size_t probes = c.name.starts_with("model:") ? 40 : 24;
    const auto r = grad_check(c.f, c.inputs, probes, 7);
    if (r.probes < 20 || !(r.max_rel_error < 1e-4)) {
      o.pass = false;
      o.detail += c.name + fmt(" %.2e; ", r.max_rel_error);
    }
    if (r.max_rel_error >= worst) {
      worst = r.max_rel_error;
      worst_name = c.name;
    }
  }
  o.detail += fmt("%zu checks, worst %.2e (", cases.size(), worst) + worst_name + ")";
  return o;
}

Outcome ac3_fusion_additivity() {
  models::FusionModel model(tiny_fusion(), 5);
  std::mt19937_64 rng(5);
  const Tensor x = random_tensor({40, 16}, rng);
  BeatAnnotation ann;
  for (std::size_t t = 2; t + 2 < 40; t += 3 + rng() % 4) {
    ann.events.push_back({static_cast<double>(t) / 50.0, static_cast<int>(rng() % 3)});
  }
  const TargetMatrix targets = build_targets(ann, 40, 50.0);
  auto shared = [&](double wa, double wb) {
    model.params().zero_grad();
    const auto out = model.forward(x, {});
    Tensor total = nn::add(nn::scale(weighted_bce(out.branch_logits[0], targets), wa),
                           nn::scale(weighted_bce(out.branch_logits[1], targets), wb));
    total.backward();
    std::vector<std::vector<double>> grads;
    for (const auto& p : model.params().parameters()) {
      if (!p.name.starts_with("embed.") && !p.name.starts_with("front")) continue;
      grads.emplace_back(p.tensor.numel(), 0.0);
      if (p.tensor.has_grad()) std::copy(p.tensor.grad().begin(), p.tensor.grad().end(), grads.back().begin());
    }
    return grads;
  };
  const auto ga = shared(1.0, 0.0);
  const auto gb = shared(0.0, 1.0);
  const auto gt = shared(1.0, 1.0);
  std::vector<double> diff(gt.size(), 0.0), norm(gt.size(), 0.0);
  double total_diff = 0.0, total_norm = 0.0;
  for (std::size_t p = 0; p < gt.size(); ++p) {
    for (std::size_t i = 0; i < gt[p].size(); ++i) {
      const double e = gt[p][i] - (ga[p][i] + gb[p][i]);
      diff[p] += e * e;
      norm[p] += gt[p][i] * gt[p][i];
    }
    total_diff += diff[p];
    total_norm += norm[p];
  }
  const double overall = total_norm > 0.0 ? std::sqrt(total_diff / total_norm) : 1.0;
  double worst = 0.0;
  std::size_t tensors = 0;
  for (std::size_t p = 0; p < gt.size(); ++p) {
    if (norm[p] <= 1e-16 * total_norm) continue;
    ++tensors;
    worst = std::max(worst, std::sqrt(diff[p] / norm[p]));
  }
  return {total_norm > 0.0 && overall < 1e-10 && worst < 1e-10,
          fmt("overall relative error %.2e; worst of %zu/%zu non-vanishing tensors %.2e", overall,
              tensors, gt.size(), worst)};
}

Outcome ac4_dbn_oracle() {
  std::mt19937_64 rng(44);
  std::uniform_int_distribution<std::size_t> len(10, 200);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const DbnConfig cfg;
  const std::size_t n_tempi = tempo_states(cfg, 10.0).size();
  std::size_t agree = 0;
  double worst = 0.0;
  const std::size_t trials = 200;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    ActivationMatrix act;
    act.frame_rate = 10.0;
    act.values = Matrix(len(rng), 3);
    for (std::size_t t = 0; t < act.frames(); ++t) {
      const double beat = u(rng);
      act.values(t, 0) = beat;
      act.values(t, 1) = beat * u(rng);
      act.values(t, 2) = 1.0 - beat;
    }
    const DecodeResult fast = decode(act, cfg);
    const DecodeResult slow = brute_force_decode(act, cfg);
    const double gap = std::abs(fast.log_score - slow.log_score);
    worst = std::max(worst, gap);
    agree += fast.path == slow.path && gap <= 1e-9;
  }
  return {agree == trials && n_tempi <= 8,
          fmt("%zu/%zu identical paths, %zu tempo states, max score gap %.2e", agree, trials,
              n_tempi, worst)};
}

Outcome ac5_metric_oracle() {
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  MetricConfig cfg;
  cfg.min_beat_time = 0.0;
  std::size_t pairs = 0;
  std::size_t mismatches = 0;
  std::size_t order_violations = 0;
  for (; pairs < 2000; ++pairs) {
    const double period = 0.3 + 0.7 * u(rng);
    std::vector<double> ref;
    const std::size_t n = 2 + static_cast<std::size_t>(u(rng) * 38);
    const double start = u(rng);
    for (std::size_t i = 0; i < n; ++i) ref.push_back(start + period * i + 0.02 * (u(rng) - 0.5));
    std::vector<double> est;
    const int mode = static_cast<int>(u(rng) * 6);
    const double noise = 0.12 * period * u(rng);
    for (std::size_t i = 0; i < n; ++i) {
      if (u(rng) < 0.1) continue;
      double t = ref[i] + noise * (2.0 * u(rng) - 1.0);
      if (mode == 1) t += 0.5 * period;
      if (mode == 2 && i % 2 == 1) continue;
      est.push_back(t);
      if (mode == 3 && i + 1 < n) est.push_back(0.5 * (ref[i] + ref[i + 1]));
      if (mode == 4 && u(rng) < 0.2) est.push_back(t + period * u(rng));
    }
    if (mode == 5) {
      est.clear();
      for (std::size_t i = 0, m = static_cast<std::size_t>(u(rng) * 30); i < m; ++i) est.push_back(20.0 * u(rng));
    }
    std::sort(est.begin(), est.end());
    const double f = f_measure(est, ref, cfg.f_measure_tolerance);
    const double f_ref = testing::reference_f_measure(est, ref, cfg.f_measure_tolerance);
    const ContinuityScores c = continuity_scores(est, ref, cfg);
    const auto c_ref = testing::reference_continuity(est, ref, cfg.continuity_phase_tol,
                                                     cfg.continuity_period_tol);
    mismatches += std::abs(f - f_ref) > 1e-9 || std::abs(c.cmlt - c_ref.cmlt) > 1e-9 ||
                  std::abs(c.amlt - c_ref.amlt) > 1e-9;
    order_violations += c.amlt < c.cmlt;
  }
  const std::vector<double> e1{1.00, 2.00}, r1{1.05, 2.50};
  const std::vector<double> e2{1.0}, r2{0.96, 1.04};
  std::vector<double> grid, doubled, shifted;
  for (int i = 0; i < 20; ++i) {
    grid.push_back(0.5 * i);
    shifted.push_back(0.5 * i + 0.15);
  }
  for (int i = 0; i < 39; ++i) doubled.push_back(0.25 * i);
  const ContinuityScores dbl = continuity_scores(doubled, grid, cfg);
  const ContinuityScores off = continuity_scores(shifted, grid, cfg);
  const bool examples = f_measure(e1, r1, 0.07) == 0.5 && f_measure(e2, r2, 0.07) == 2.0 / 3.0 &&
                        dbl.cmlt == 0.0 && dbl.amlt == 1.0 && off.cmlt == 0.0 && off.amlt == 0.0;
  return {mismatches == 0 && order_violations == 0 && examples,
          fmt("%zu pairs, %zu mismatches, %zu amlt<cmlt, hand examples %s", pairs, mismatches,
              order_violations, examples ? "exact" : "WRONG")};
}

struct Corpus {
  std::vector<Song> train, valid, test;
};

Corpus click_corpus() {
  CorpusSpec spec;
  spec.n_train = 10;
  spec.n_valid = 3;
  spec.n_test = 5;
  spec.duration = 20.0;
  Corpus c;
  for (auto& item : make_click_corpus(spec)) {
    Song s{item.name, std::move(item.audio), std::move(item.annotation)};
    (item.split == Split::kTrain ? c.train : item.split == Split::kValid ? c.valid : c.test)
        .push_back(std::move(s));
  }
  return c;
}

std::pair<double, double> train_and_score(models::BeatModel& model, const Corpus& corpus,
                                          std::size_t epochs) {
  TrainSetup setup;
  setup.train.batch_size = 4;
  setup.train.steps_per_epoch = 20;
  setup.train.max_epochs = epochs;
  setup.train.lr = 1e-3;
  setup.train.validation_decode_cap = 3;
  setup.frontend.n_bands = static_cast<int>(model.n_bands());
  train(model, corpus.train, corpus.valid, setup);
  const FeatureExtractor extractor(setup.frontend);
  double beat = 0.0, down = 0.0;
  for (const auto& song : corpus.test) {
    const DecodeResult r = track(song.audio, model, extractor, setup.dbn);
    beat += evaluate_sequences(r.annotation.beat_times(), song.annotation.beat_times(), setup.metrics).f1;
    down += evaluate_sequences(r.annotation.downbeat_times(), song.annotation.downbeat_times(), setup.metrics).f1;
  }
  return {beat / corpus.test.size(), down / corpus.test.size()};
}

Outcome ac6_desk_training() {
  const auto start = std::chrono::steady_clock::now();
  const Corpus corpus = click_corpus();
  models::TcnModel tcn(toy_tcn(), 1);
  const auto [tcn_beat, tcn_down] = train_and_score(tcn, corpus, 30);
  models::SpecTntModel spectnt(toy_spectnt(), 1);
  const auto [st_beat, st_down] = train_and_score(spectnt, corpus, 10);
  const double minutes =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / 60.0;
  return {tcn_beat >= 0.95 && tcn_down >= 0.90 && st_beat >= 0.90 && minutes <= 20.0,
          fmt("tcn beat %.3f down %.3f; spectnt beat %.3f (down %.3f); %.1f min", tcn_beat,
              tcn_down, st_beat, st_down, minutes)};
}

Outcome ac7_hop_statistics() {
  std::mt19937_64 rng(77);
  const int n = 10000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double s = augment_hop(320, rng) / 320.0;
    sum += s;
    sq += s * s;
  }
  const double mean = sum / n;
  const double sd = std::sqrt((sq - n * mean * mean) / (n - 1));
  return {std::abs(mean - 1.0) <= 0.01 && sd >= 0.045 && sd <= 0.055,
          fmt("mean %.4f, std %.4f over %d draws", mean, sd, n)};
}

Outcome ac8_attention_export() {
  models::SpecTntConfig cfg;
  cfg.n_bands = 32;
  cfg.n_blocks = 2;
  cfg.spectral_dim = 16;
  cfg.spectral_heads = 2;
  cfg.temporal_dim = 32;
  cfg.temporal_heads = 4;
  cfg.frontend_channels = 8;
  const models::SpecTntModel model(cfg, 8);
  FrontendConfig fc;
  fc.n_bands = 32;
  const FeatureExtractor extractor(fc);
  const auto [clip, ann] = synth_clicks(120.0, 4, 6.0, 16000);
  const HarmonicRepresentation rep =
      extractor.compute_window(clip.samples, 0, model.input_frames(), fc.base_hop);
  const Tensor x = models::features_tensor(rep.values);
  const std::size_t t = model.input_frames();
  const std::size_t f = cfg.reduced_bands();
  bool ok = true;
  double worst = 0.0;
  std::size_t maps = 0;
  for (auto kind : {models::AttentionKind::kSpectral, models::AttentionKind::kTemporal}) {
    const std::size_t heads = kind == models::AttentionKind::kSpectral ? cfg.spectral_heads : cfg.temporal_heads;
    const std::size_t cols = kind == models::AttentionKind::kSpectral ? f + 1 : t;
    for (std::size_t h = 0; h < heads; ++h) {
      const Matrix m = model.export_attention(x, kind, h);
      ok &= m.rows == t && m.cols == cols;
      for (std::size_t r = 0; r < m.rows; ++r) {
        double s = 0.0;
        for (double v : m.row(r)) s += v;
        worst = std::max(worst, std::abs(s - 1.0));
      }
      ++maps;
    }
  }
  testing::TempDir dir("ac8");
  const Matrix m = model.export_attention(x, models::AttentionKind::kTemporal, 0);
  write_float32_matrix(dir.path() / "t.bin", dir.path() / "t.json", m, {{"kind", "temporal"}});
  const Matrix back = read_float32_matrix(dir.path() / "t.bin", dir.path() / "t.json");
  for (std::size_t r = 0; r < back.rows; ++r) {
    double s = 0.0;
    for (double v : back.row(r)) s += v;
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return {ok && worst <= 1e-5,
          fmt("%zu maps, spectral %zux%zu, temporal %zux%zu, max |row sum - 1| %.2e", maps, t, f + 1,
              t, t, worst)};
}

Outcome ac9_determinism() {
  testing::TempDir dir("ac9");
  const auto root = dir.path();
  auto run = [](std::vector<std::string> args) {
    args.insert(args.begin(), "beatforge");
    return cli::run(args);
  };
  if (run({"synth", "--out", (root / "corpus").string(), "--train", "2", "--valid", "1", "--test",
           "1", "--duration", "8", "--seed", "3"}) != 0) {
    return {false, "synth failed"};
  }
  const std::vector<std::string> overrides{
      "--set", "frontend.n_bands=32", "--set", "model.frontend_filters=6",
      "--set", "model.frontend_kernels=[[3,3],[3,3],[4,3]]", "--set", "model.pool_sizes=[3,2,1]",
      "--set", "model.n_layers=4", "--set", "model.channels=8", "--set", "model.input_seconds=3.0",
      "--set", "train.batch_size=2", "--set", "train.steps_per_epoch=4", "--set", "train.max_epochs=2",
      "--set", "train.validation_decode_cap=1"};
  for (const char* name : {"a", "b"}) {
    std::vector<std::string> args{"train", (root / "corpus" / "manifest.json").string(), "--arch",
                                  "tcn", "--out", (root / name).string(), "--seed", "5", "--jobs", "1"};
    args.insert(args.end(), overrides.begin(), overrides.end());
    if (run(args) != 0) return {false, "train failed"};
  }
  const auto clip = root / "corpus" / "test_003.wav";
  for (const char* name : {"a", "b"}) {
    if (run({"track", clip.string(), "--arch", "tcn", "--checkpoint", (root / "a" / "best.ckpt").string(),
             "--out", (root / (std::string(name) + ".beats")).string()}) != 0) {
      return {false, "track failed"};
    }
  }
  using testing::read_bytes;
  const bool train_same = read_bytes(root / "a" / "best.ckpt") == read_bytes(root / "b" / "best.ckpt") &&
                          read_bytes(root / "a" / "best.ckpt.bin") == read_bytes(root / "b" / "best.ckpt.bin") &&
                          read_bytes(root / "a" / "train_log.jsonl") == read_bytes(root / "b" / "train_log.jsonl");
  const auto track_a = read_bytes(root / "a.beats");
  const bool track_same = !track_a.empty() && track_a == read_bytes(root / "b.beats");
  return {train_same && track_same, fmt("train outputs %s, track outputs %s",
                                        train_same ? "identical" : "DIFFER",
                                        track_same ? "identical" : "DIFFER")};
}

}  // namespace
}  // namespace beatforge

int main() {
  using namespace beatforge;
  setenv("BEATFORGE_LOG", "error", 1);
  log::init_from_env();
  const std::vector<std::pair<const char*, Outcome (*)()>> criteria{
      {"AC1 parameter counts", ac1_param_counts},
      {"AC2 gradient suite", ac2_gradients},
      {"AC3 fusion gradient additivity", ac3_fusion_additivity},
      {"AC4 dbn oracle equivalence", ac4_dbn_oracle},
      {"AC5 metric oracle", ac5_metric_oracle},
      {"AC6 desk-scale training", ac6_desk_training},
      {"AC7 augmentation statistics", ac7_hop_statistics},
      {"AC8 attention export", ac8_attention_export},
      {"AC9 determinism", ac9_determinism}};
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !o.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
