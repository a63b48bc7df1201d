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
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "beatforge/audio_io.hpp"
#include "beatforge/dbn.hpp"
#include "beatforge/frontend.hpp"
#include "beatforge/metrics.hpp"
#include "beatforge/models/model.hpp"
#include "beatforge/nn/tensor.hpp"

namespace beatforge {

struct TrainConfig {
  std::size_t batch_size = 128;
  std::size_t steps_per_epoch = 500;
  std::size_t max_epochs = 100;
  double lr = 1e-3;
  double weight_decay = 0.0;
  std::uint64_t seed = 0;
  /// Loss multiplier on the downbeat channel.
  double downbeat_weight = 1.0;
  /// Validation clips decoded with the DBN per epoch.
  std::size_t validation_decode_cap = 20;
  /// Write a checkpoint after every epoch, not only the best one.
  bool keep_epoch_checkpoints = false;
  /// Stop once the selection score reaches this value (> 1 disables).
  double stop_score = 2.0;

  void validate() const;
};

void to_json(nlohmann::json& j, const TrainConfig& cfg);
void from_json(const nlohmann::json& j, TrainConfig& cfg);

/// A song resampled to the front-end rate with its annotation.
struct Song {
  std::string name;
  AudioClip audio;
  BeatAnnotation annotation;
};

/// Loads and resamples every entry of `split`. Throws on unreadable files.
std::vector<Song> load_songs(const DatasetManifest& manifest, Split split,
                             const FrontendConfig& cfg);

struct ChunkRef {
  std::size_t song = 0;
  double start = 0.0;  // seconds
};

struct ChunkIndex {
  std::vector<ChunkRef> chunks;
  double chunk_seconds = 0.0;
};

/// Chunk starts at 0, 1, 2, ... s with start + chunk_seconds <= duration.
/// Songs shorter than a chunk contribute nothing (logged as SongTooShort).
ChunkIndex build_chunk_index(std::span<const double> durations, double chunk_seconds);
ChunkIndex build_chunk_index(const std::vector<Song>& songs, double chunk_seconds);

/// Uniform draws with replacement from the chunk list. Throws EmptyIndex.
std::vector<std::size_t> sample_chunk_ids(const ChunkIndex& index, std::mt19937_64& rng,
                                          std::size_t batch_size);

struct TrainingExample {
  HarmonicRepresentation features;
  TargetMatrix targets;
  ChunkRef chunk;
  int hop = 0;
};

/// Events of `annotation` inside a window of `n_frames` frames whose first
/// frame sits at `start` seconds, shifted to window time.
BeatAnnotation window_annotation(const BeatAnnotation& annotation, double start,
                                 std::size_t n_frames, double frame_rate);

/// Draws `batch_size` chunks, augments each hop, and builds features and
/// targets with exactly `n_frames` frames per example.
std::vector<TrainingExample> sample_batch(const ChunkIndex& index, const std::vector<Song>& songs,
                                          const FeatureExtractor& extractor, std::size_t n_frames,
                                          std::mt19937_64& rng, std::size_t batch_size);

/// Mean over frames and channels of w * BCE(sigmoid(z), y); the downbeat
/// channel's weights are scaled by `downbeat_weight`.
nn::Tensor weighted_bce(const nn::Tensor& logits, const TargetMatrix& targets,
                        double downbeat_weight = 1.0);

/// Sum of weighted_bce over every head of the model output.
nn::Tensor model_loss(const models::ModelOutput& output, const TargetMatrix& targets,
                      double downbeat_weight = 1.0);

struct EpochRecord {
  std::size_t epoch = 0;
  double loss = 0.0;
  double beat_f1 = 0.0;
  double downbeat_f1 = 0.0;
  /// Framewise F1 of thresholded (0.5) beat activations over all validation clips.
  double frame_f1 = 0.0;
  bool selected = false;

  nlohmann::json to_json() const;
};

struct TrainSetup {
  TrainConfig train;
  FrontendConfig frontend;
  DbnConfig dbn;
  MetricConfig metrics;
  /// Output directory for checkpoints and the log; empty disables writing.
  std::filesystem::path out_dir;
  /// Extra checkpoint metadata stored alongside the model config.
  nlohmann::json checkpoint_config = nlohmann::json::object();
  /// Called after every epoch with the finished record.
  std::function<void(const EpochRecord&)> on_epoch;
};

struct TrainResult {
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  double best_score = -1.0;
};

/// Epoch loop: steps_per_epoch optimiser steps, then validation. The model
/// is left holding the parameters of the best epoch.
TrainResult train(models::BeatModel& model, const std::vector<Song>& train_songs,
                  const std::vector<Song>& valid_songs, const TrainSetup& setup);

/// Validation metrics for the current parameters (no gradient tape).
EpochRecord validate_model(const models::BeatModel& model, const std::vector<Song>& songs,
                           const TrainSetup& setup);

}  // namespace beatforge
