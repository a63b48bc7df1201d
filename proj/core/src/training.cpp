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

#include "beatforge/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "beatforge/config.hpp"
#include "beatforge/errors.hpp"
#include "beatforge/inference.hpp"
#include "beatforge/json_util.hpp"
#include "beatforge/log.hpp"
#include "beatforge/nn/adam.hpp"
#include "beatforge/nn/checkpoint.hpp"
#include "beatforge/nn/ops.hpp"

namespace beatforge {

namespace {

template <typename C, typename V>
void train_fields(C& c, V&& visit) {
  visit("batch_size", c.batch_size);
  visit("steps_per_epoch", c.steps_per_epoch);
  visit("max_epochs", c.max_epochs);
  visit("lr", c.lr);
  visit("weight_decay", c.weight_decay);
  visit("seed", c.seed);
  visit("downbeat_weight", c.downbeat_weight);
  visit("validation_decode_cap", c.validation_decode_cap);
  visit("keep_epoch_checkpoints", c.keep_epoch_checkpoints);
  visit("stop_score", c.stop_score);
}

std::vector<std::vector<double>> snapshot(const nn::ParamStore& store) {
  std::vector<std::vector<double>> values;
  for (const auto& p : store.parameters()) {
    values.emplace_back(p.tensor.data().begin(), p.tensor.data().end());
  }
  return values;
}

void restore(nn::ParamStore& store, const std::vector<std::vector<double>>& values) {
  const auto& params = store.parameters();
  for (std::size_t i = 0; i < params.size(); ++i) {
    nn::Tensor t = params[i].tensor;
    std::copy(values[i].begin(), values[i].end(), t.data().begin());
  }
}

nlohmann::json checkpoint_config(const models::BeatModel& model, const TrainSetup& setup) {
  nlohmann::json cfg = setup.checkpoint_config;
  cfg["frontend"] = setup.frontend;
  cfg["model"] = model.config_json();
  cfg["train"] = setup.train;
  return cfg;
}

}  // namespace

void TrainConfig::validate() const {
  if (batch_size == 0 || steps_per_epoch == 0) {
    throw Error(ErrorCode::kInvalidArgument, "batch_size and steps_per_epoch must be >= 1");
  }
  if (!(lr >= 0.0) || !(weight_decay >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "lr and weight_decay must be non-negative");
  }
}

void to_json(nlohmann::json& j, const TrainConfig& cfg) {
  json_util::write_fields(j, cfg, [](auto& c, auto&& v) { train_fields(c, v); });
}

void from_json(const nlohmann::json& j, TrainConfig& cfg) {
  json_util::read_fields(j, cfg, [](auto& c, auto&& v) { train_fields(c, v); }, "train");
}

std::vector<Song> load_songs(const DatasetManifest& manifest, Split split,
                             const FrontendConfig& cfg) {
  std::vector<Song> songs;
  for (const auto& entry : manifest.with_split(split)) {
    if (!entry.resolvable) {
      throw Error(ErrorCode::kIo, "manifest entry not found: " + entry.audio_path.string());
    }
    AudioClip audio = load_wav(entry.audio_path);
    if (audio.sample_rate != cfg.sample_rate) audio = resample(audio, cfg.sample_rate);
    songs.push_back({entry.audio_path.stem().string(), std::move(audio),
                     parse_annotation(entry.annotation_path)});
  }
  return songs;
}

ChunkIndex build_chunk_index(std::span<const double> durations, double chunk_seconds) {
  if (!(chunk_seconds > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "chunk_seconds must be positive");
  }
  ChunkIndex index;
  index.chunk_seconds = chunk_seconds;
  for (std::size_t song = 0; song < durations.size(); ++song) {
    if (durations[song] + 1e-9 < chunk_seconds) {
      log::warn("SongTooShort: song " + std::to_string(song) + " lasts " +
                std::to_string(durations[song]) + " s, chunks need " +
                std::to_string(chunk_seconds) + " s; skipped");
      continue;
    }
    for (std::size_t s = 0; static_cast<double>(s) + chunk_seconds <= durations[song] + 1e-9; ++s) {
      index.chunks.push_back({song, static_cast<double>(s)});
    }
  }
  return index;
}

ChunkIndex build_chunk_index(const std::vector<Song>& songs, double chunk_seconds) {
  std::vector<double> durations;
  for (const auto& s : songs) durations.push_back(s.audio.duration());
  return build_chunk_index(durations, chunk_seconds);
}

std::vector<std::size_t> sample_chunk_ids(const ChunkIndex& index, std::mt19937_64& rng,
                                          std::size_t batch_size) {
  if (index.chunks.empty()) throw Error(ErrorCode::kEmptyIndex, "chunk index is empty");
  std::uniform_int_distribution<std::size_t> pick(0, index.chunks.size() - 1);
  std::vector<std::size_t> ids(batch_size);
  for (auto& id : ids) id = pick(rng);
  return ids;
}

BeatAnnotation window_annotation(const BeatAnnotation& annotation, double start,
                                 std::size_t n_frames, double frame_rate) {
  BeatAnnotation out;
  for (const auto& e : annotation.events) {
    const double rel = e.time - start;
    const auto frame = std::llround(rel * frame_rate);
    if (frame < 0 || frame >= static_cast<long long>(n_frames)) continue;
    out.events.push_back({std::max(rel, 0.0), e.bar_position});
  }
  return out;
}

std::vector<TrainingExample> sample_batch(const ChunkIndex& index, const std::vector<Song>& songs,
                                          const FeatureExtractor& extractor, std::size_t n_frames,
                                          std::mt19937_64& rng, std::size_t batch_size) {
  const FrontendConfig& fc = extractor.config();
  const std::vector<std::size_t> ids = sample_chunk_ids(index, rng, batch_size);
  std::vector<TrainingExample> batch;
  batch.reserve(batch_size);
  for (std::size_t id : ids) {
    const ChunkRef& chunk = index.chunks[id];
    const Song& song = songs.at(chunk.song);
    TrainingExample ex;
    ex.chunk = chunk;
    ex.hop = augment_hop(fc.base_hop, rng, fc.hop_std);
    const auto start_sample = static_cast<std::ptrdiff_t>(std::llround(chunk.start * fc.sample_rate));
    ex.features = extractor.compute_window(song.audio.samples, start_sample, n_frames, ex.hop);
    const double rate = static_cast<double>(fc.sample_rate) / ex.hop;
    ex.targets = build_targets(window_annotation(song.annotation, chunk.start, n_frames, rate),
                               n_frames, rate);
    batch.push_back(std::move(ex));
  }
  return batch;
}

nn::Tensor weighted_bce(const nn::Tensor& logits, const TargetMatrix& targets,
                        double downbeat_weight) {
  if (logits.rank() != 2 || logits.dim(1) != 3 || logits.dim(0) != targets.n_frames()) {
    throw Error(ErrorCode::kShapeMismatch, "logits " + nn::shape_string(logits.shape()) +
                                               " do not match " +
                                               std::to_string(targets.n_frames()) +
                                               " target frames");
  }
  std::vector<double> weights = targets.weights.data;
  for (std::size_t t = 0; t < targets.n_frames(); ++t) weights[t * 3 + kDownbeat] *= downbeat_weight;
  return nn::weighted_bce_with_logits(logits, targets.labels.data, weights);
}

nn::Tensor model_loss(const models::ModelOutput& output, const TargetMatrix& targets,
                      double downbeat_weight) {
  if (output.branch_logits.empty()) throw Error(ErrorCode::kInvalidArgument, "no model heads");
  nn::Tensor total = weighted_bce(output.branch_logits[0], targets, downbeat_weight);
  for (std::size_t b = 1; b < output.branch_logits.size(); ++b) {
    total = nn::add(total, weighted_bce(output.branch_logits[b], targets, downbeat_weight));
  }
  return total;
}

nlohmann::json EpochRecord::to_json() const {
  return {{"epoch", epoch},     {"loss", loss},         {"beat_f1", beat_f1},
          {"downbeat_f1", downbeat_f1}, {"frame_f1", frame_f1}, {"selected", selected}};
}

EpochRecord validate_model(const models::BeatModel& model, const std::vector<Song>& songs,
                           const TrainSetup& setup) {
  nn::NoGradGuard no_grad;
  const FeatureExtractor extractor(setup.frontend);
  EpochRecord record;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t decoded = 0;
  for (std::size_t i = 0; i < songs.size(); ++i) {
    const Song& song = songs[i];
    const ActivationMatrix act = predict_activations(model, extractor, song.audio);
    const TargetMatrix targets =
        build_targets(window_annotation(song.annotation, 0.0, act.frames(), act.frame_rate),
                      act.frames(), act.frame_rate);
    for (std::size_t t = 0; t < act.frames(); ++t) {
      const bool predicted = act.values(t, kBeat) > 0.5;
      const bool actual = targets.labels(t, kBeat) > 0.0 && targets.weights(t, kBeat) == 1.0;
      tp += predicted && actual;
      fp += predicted && !actual;
      fn += !predicted && actual;
    }
    if (i < setup.train.validation_decode_cap) {
      const DecodeResult result = decode(act, setup.dbn);
      const EvalReport beat = evaluate_sequences(result.annotation.beat_times(),
                                                 song.annotation.beat_times(), setup.metrics);
      const EvalReport down = evaluate_sequences(result.annotation.downbeat_times(),
                                                 song.annotation.downbeat_times(), setup.metrics);
      record.beat_f1 += beat.f1;
      record.downbeat_f1 += down.f1;
      ++decoded;
    }
  }
  if (decoded > 0) {
    record.beat_f1 /= static_cast<double>(decoded);
    record.downbeat_f1 /= static_cast<double>(decoded);
  }
  record.frame_f1 = tp + fp + fn == 0 ? 1.0 : 2.0 * tp / (2.0 * tp + fp + fn);
  return record;
}

TrainResult train(models::BeatModel& model, const std::vector<Song>& train_songs,
                  const std::vector<Song>& valid_songs, const TrainSetup& setup) {
  const TrainConfig& cfg = setup.train;
  cfg.validate();
  const FeatureExtractor extractor(setup.frontend);
  if (static_cast<std::size_t>(setup.frontend.n_bands) != model.n_bands()) {
    throw Error(ErrorCode::kShapeMismatch, "front-end band count differs from the model's");
  }
  const ChunkIndex index = build_chunk_index(train_songs, model.input_seconds());
  if (index.chunks.empty()) throw Error(ErrorCode::kEmptyIndex, "no training chunks");
  const std::size_t n_frames = model.input_frames();

  std::mt19937_64 data_rng(cfg.seed);
  std::mt19937_64 dropout_rng(cfg.seed ^ 0x5DEECE66DULL);
  const nn::RunContext ctx{true, &dropout_rng};
  nn::Adam optimizer(model.params(), {cfg.lr, 0.9, 0.999, 1e-8, cfg.weight_decay});

  std::ofstream log_file;
  if (!setup.out_dir.empty()) {
    std::filesystem::create_directories(setup.out_dir);
    log_file.open(setup.out_dir / "train_log.jsonl", std::ios::trunc);
  }
  const nlohmann::json ckpt_cfg = checkpoint_config(model, setup);
  const std::string arch = models::to_string(model.arch());

  TrainResult result;
  std::vector<std::vector<double>> best_values = snapshot(model.params());
  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    double epoch_loss = 0.0;
    for (std::size_t step = 0; step < cfg.steps_per_epoch; ++step) {
      const auto batch =
          sample_batch(index, train_songs, extractor, n_frames, data_rng, cfg.batch_size);
      model.params().zero_grad();
      double batch_loss = 0.0;
      for (const auto& ex : batch) {
        const models::ModelOutput out = model.forward(models::features_tensor(ex.features.values), ctx);
        nn::Tensor loss = nn::scale(model_loss(out, ex.targets, cfg.downbeat_weight),
                                    1.0 / static_cast<double>(batch.size()));
        if (!std::isfinite(loss.item())) {
          throw Error(ErrorCode::kNumerical,
                      "non-finite loss at epoch " + std::to_string(epoch) + ", step " +
                          std::to_string(step) + " (song " + std::to_string(ex.chunk.song) +
                          ", start " + std::to_string(ex.chunk.start) + " s, hop " +
                          std::to_string(ex.hop) + ")");
        }
        loss.backward();
        batch_loss += loss.item();
      }
      optimizer.step(model.params());
      epoch_loss += batch_loss;
    }

    EpochRecord record = validate_model(model, valid_songs, setup);
    record.epoch = epoch;
    record.loss = epoch_loss / static_cast<double>(cfg.steps_per_epoch);
    const double score = 0.5 * (record.beat_f1 + record.downbeat_f1);
    record.selected = score > result.best_score;
    if (record.selected) {
      result.best_score = score;
      result.best_epoch = epoch;
      best_values = snapshot(model.params());
      if (!setup.out_dir.empty()) {
        nn::save_checkpoint(setup.out_dir / "best.ckpt", model.params(), arch, ckpt_cfg);
      }
    }
    if (!setup.out_dir.empty() && cfg.keep_epoch_checkpoints) {
      char name[32];
      std::snprintf(name, sizeof(name), "epoch_%03zu.ckpt", epoch);
      nn::save_checkpoint(setup.out_dir / name, model.params(), arch, ckpt_cfg);
    }
    if (log_file.is_open()) log_file << record.to_json().dump() << "\n" << std::flush;
    log::info(record.to_json().dump());
    if (setup.on_epoch) setup.on_epoch(record);
    result.history.push_back(record);
    if (score >= cfg.stop_score) break;
  }
  restore(model.params(), best_values);
  return result;
}

}  // namespace beatforge
