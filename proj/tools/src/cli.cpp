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

#include "beatforge_cli/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <thread>

#include "beatforge/audio_io.hpp"
#include "beatforge/config.hpp"
#include "beatforge/corpus.hpp"
#include "beatforge/dbn.hpp"
#include "beatforge/frontend.hpp"
#include "beatforge/inference.hpp"
#include "beatforge/log.hpp"
#include "beatforge/matrix.hpp"
#include "beatforge/metrics.hpp"
#include "beatforge/models/model.hpp"
#include "beatforge/models/spectnt.hpp"
#include "beatforge/nn/checkpoint.hpp"
#include "beatforge/training.hpp"

namespace beatforge::cli {

namespace fs = std::filesystem;

namespace {

struct CommonOptions {
  std::vector<std::string> overrides;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
};

void add_common(CLI::App* cmd, CommonOptions& common) {
  cmd->add_option("--set", common.overrides, "Config override key=value (repeatable)");
  cmd->add_option("--config", common.config_path, "JSON run config");
  cmd->add_option("--seed", common.seed, "Random seed");
  cmd->add_option("--jobs", common.jobs, "Parallel files")->check(CLI::PositiveNumber);
}

RunConfig assemble_config(const CommonOptions& common) {
  nlohmann::json tree = run_config_to_json(RunConfig{});
  if (!common.config_path.empty()) {
    tree.merge_patch(run_config_to_json(load_run_config(common.config_path)));
  }
  for (const auto& o : common.overrides) apply_override(tree, o);
  RunConfig cfg = run_config_from_json(tree);
  if (common.seed) cfg.train.seed = *common.seed;
  return cfg;
}

struct LoadedModel {
  std::unique_ptr<models::BeatModel> model;
  FrontendConfig frontend;
};

LoadedModel load_model(const std::string& checkpoint, const std::string& arch_flag) {
  if (!fs::exists(checkpoint)) {
    throw Error(ErrorCode::kCheckpoint, "checkpoint not found: " + checkpoint);
  }
  const nn::CheckpointHeader header = nn::read_checkpoint_header(checkpoint);
  if (!arch_flag.empty() &&
      models::parse_arch(arch_flag) != models::parse_arch(header.arch)) {
    throw Error(ErrorCode::kArchMismatch,
                "checkpoint holds a " + header.arch + " model, --arch says " + arch_flag);
  }
  LoadedModel loaded;
  try {
    loaded.frontend = header.config.value("frontend", nlohmann::json::object()).get<FrontendConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCheckpoint, "bad front-end config in checkpoint: " +
                                            std::string(e.what()));
  }
  loaded.model = models::make_model(models::parse_arch(header.arch),
                                    header.config.value("model", nlohmann::json::object()), 0);
  nn::load_checkpoint_params(checkpoint, loaded.model->params());
  return loaded;
}

AudioClip load_audio_at(const std::string& path, int rate) {
  AudioClip clip = load_wav(path);
  return clip.sample_rate == rate ? clip : resample(clip, rate);
}

/// Runs fn(i) for i in [0, n) on up to `jobs` threads; rethrows the first
/// failure in index order.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(jobs, 1), std::max<std::size_t>(n, 1));
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> threads;
  for (std::size_t w = 1; w < workers; ++w) threads.emplace_back(work);
  work();
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

struct TrackOptions {
  std::vector<std::string> inputs;
  std::string arch;
  std::string checkpoint;
  std::string out;
};

int cmd_track(const TrackOptions& opt, const CommonOptions& common) {
  const RunConfig cfg = assemble_config(common);
  const LoadedModel loaded = load_model(opt.checkpoint, opt.arch);
  const FeatureExtractor extractor(loaded.frontend);
  const bool to_dir = opt.inputs.size() > 1 || fs::is_directory(opt.out) ||
                      (!opt.out.empty() && (opt.out.back() == '/'));
  if (to_dir) fs::create_directories(opt.out);
  std::vector<std::string> lines(opt.inputs.size());
  parallel_for(opt.inputs.size(), common.jobs, [&](std::size_t i) {
    const AudioClip clip = load_audio_at(opt.inputs[i], loaded.frontend.sample_rate);
    const DecodeResult result = track(clip, *loaded.model, extractor, cfg.dbn);
    const fs::path out =
        to_dir ? fs::path(opt.out) / (fs::path(opt.inputs[i]).stem().string() + ".beats")
               : fs::path(opt.out);
    write_annotation(out, result.annotation);
    if (result.low_confidence) log::warn(opt.inputs[i] + ": activations are near zero");
    lines[i] = out.string() + "\t" + std::to_string(result.annotation.beat_times().size()) +
               " beats\t" + std::to_string(result.annotation.downbeat_times().size()) +
               " downbeats";
  });
  for (const auto& l : lines) std::cout << l << "\n";
  return kExitOk;
}

struct TrainOptions {
  std::string manifest;
  std::string arch;
  std::string out;
};

int cmd_train(const TrainOptions& opt, const CommonOptions& common) {
  const RunConfig cfg = assemble_config(common);
  const models::Arch arch = models::parse_arch(opt.arch);
  const DatasetManifest manifest = load_manifest(opt.manifest);
  const std::vector<Song> train_songs = load_songs(manifest, Split::kTrain, cfg.frontend);
  std::vector<Song> valid_songs = load_songs(manifest, Split::kValid, cfg.frontend);
  if (train_songs.empty()) throw Error(ErrorCode::kEmptyIndex, "manifest has no training entries");
  if (valid_songs.empty()) {
    log::warn("manifest has no validation entries; selecting on the training songs");
    valid_songs = train_songs;
  }
  auto model = models::make_model(arch, model_config_for(arch, cfg.model, cfg.frontend),
                                   cfg.train.seed);
  TrainSetup setup;
  setup.train = cfg.train;
  setup.frontend = cfg.frontend;
  setup.dbn = cfg.dbn;
  setup.metrics = cfg.metrics;
  setup.out_dir = opt.out;
  setup.on_epoch = [](const EpochRecord& r) { std::cout << r.to_json().dump() << std::endl; };
  fs::create_directories(opt.out);
  {
    nlohmann::json run = run_config_to_json(cfg);
    run["model"] = model->config_json();
    run["arch"] = models::to_string(arch);
    std::ofstream(fs::path(opt.out) / "config.json") << run.dump(2) << "\n";
  }
  const TrainResult result = train(*model, train_songs, valid_songs, setup);
  std::cout << nlohmann::json{{"best_epoch", result.best_epoch},
                              {"best_score", result.best_score},
                              {"checkpoint", (fs::path(opt.out) / "best.ckpt").string()}}
                   .dump()
            << std::endl;
  return kExitOk;
}

struct EvaluateOptions {
  std::string estimates;
  std::string references;
  bool downbeats = false;
  std::string out;
};

int cmd_evaluate(const EvaluateOptions& opt, const CommonOptions& common) {
  const RunConfig cfg = assemble_config(common);
  const DatasetReport report = evaluate_dataset(opt.estimates, opt.references, cfg.metrics);
  if (report.files.empty()) {
    throw Error(ErrorCode::kMissingPair, "no estimate/reference pairs found");
  }
  const nlohmann::json j = report_to_json(report);
  std::cout << report_to_table(report, opt.downbeats) << "\n" << j.dump(2) << "\n";
  if (!opt.out.empty()) std::ofstream(opt.out) << j.dump(2) << "\n";
  return kExitOk;
}

struct ExportOptions {
  std::string input;
  std::string checkpoint;
  std::string arch;
  std::string out;
  bool activations = false;
  std::string attention;
  std::size_t head = 0;
  int branch = -1;
};

int cmd_export(const ExportOptions& opt, const CommonOptions&) {
  if (opt.activations == !opt.attention.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "choose exactly one of --activations / --attention");
  }
  const LoadedModel loaded = load_model(opt.checkpoint, opt.arch);
  const FeatureExtractor extractor(loaded.frontend);
  const AudioClip clip = load_audio_at(opt.input, loaded.frontend.sample_rate);
  const fs::path bin = opt.out + ".bin";
  const fs::path sidecar = opt.out + ".json";
  if (opt.activations) {
    const ActivationMatrix act = predict_activations(*loaded.model, extractor, clip, opt.branch);
    write_float32_matrix(bin, sidecar, act.values,
                         {{"kind", "activations"},
                          {"frame_rate", act.frame_rate},
                          {"branch", opt.branch},
                          {"columns", {"beat", "downbeat", "non_beat"}}});
  } else {
    const auto* spectnt = dynamic_cast<const models::SpecTntModel*>(loaded.model.get());
    if (spectnt == nullptr) {
      throw Error(ErrorCode::kArchMismatch, "attention export needs a spectnt checkpoint");
    }
    const models::AttentionKind kind = models::parse_attention_kind(opt.attention);
    const HarmonicRepresentation rep = extractor.compute_window(
        clip.samples, 0, spectnt->input_frames(), loaded.frontend.base_hop);
    const Matrix map =
        spectnt->export_attention(models::features_tensor(rep.values), kind, opt.head);
    write_float32_matrix(bin, sidecar, map,
                         {{"kind", models::to_string(kind)}, {"head", opt.head}});
  }
  std::cout << bin.string() << "\n" << sidecar.string() << "\n";
  return kExitOk;
}

struct SynthOptions {
  std::string out;
  CorpusSpec spec;
};

int cmd_synth(SynthOptions opt, const CommonOptions& common) {
  if (common.seed) opt.spec.seed = *common.seed;
  const DatasetManifest manifest = write_corpus(opt.out, make_click_corpus(opt.spec));
  std::cout << (fs::path(opt.out) / "manifest.json").string() << "\t" << manifest.entries.size()
            << " clips\n";
  return kExitOk;
}

}  // namespace

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kCheckpoint:
    case ErrorCode::kArchMismatch:
      return kExitCheckpoint;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kHeadOutOfRange:
      return kExitUsage;
    default:
      return kExitData;
  }
}

int run(const std::vector<std::string>& args) {
  log::init_from_env();
  CLI::App app{"Beat and downbeat tracking"};
  app.name(args.empty() ? "beatforge" : fs::path(args[0]).filename().string());
  app.require_subcommand(1);

  CommonOptions common;

  TrackOptions track_opt;
  auto* track_cmd = app.add_subcommand("track", "Track beats and downbeats in audio files");
  track_cmd->add_option("audio", track_opt.inputs, "WAV files")->required();
  track_cmd->add_option("--arch", track_opt.arch, "spectnt | tcn | fusion")->required();
  track_cmd->add_option("--checkpoint", track_opt.checkpoint, "Checkpoint index")->required();
  track_cmd->add_option("--out", track_opt.out, "Output .beats file or directory")->required();
  add_common(track_cmd, common);

  TrainOptions train_opt;
  auto* train_cmd = app.add_subcommand("train", "Train a model from a dataset manifest");
  train_cmd->add_option("manifest", train_opt.manifest, "Manifest (JSON or text)")->required();
  train_cmd->add_option("--arch", train_opt.arch, "spectnt | tcn | fusion")->required();
  train_cmd->add_option("--out", train_opt.out, "Output directory")->required();
  add_common(train_cmd, common);

  EvaluateOptions eval_opt;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score estimated against reference annotations");
  eval_cmd->add_option("estimates", eval_opt.estimates, "Directory of estimated .beats")->required();
  eval_cmd->add_option("references", eval_opt.references, "Directory of reference .beats")
      ->required();
  eval_cmd->add_flag("--downbeats", eval_opt.downbeats, "Show the downbeat table");
  eval_cmd->add_option("--out", eval_opt.out, "Write the JSON report here too");
  add_common(eval_cmd, common);

  ExportOptions export_opt;
  auto* export_cmd = app.add_subcommand("export", "Dump activations or attention maps");
  export_cmd->add_option("audio", export_opt.input, "WAV file")->required();
  export_cmd->add_option("--checkpoint", export_opt.checkpoint, "Checkpoint index")->required();
  export_cmd->add_option("--arch", export_opt.arch, "Expected architecture");
  export_cmd->add_option("--out", export_opt.out, "Output prefix (.bin/.json)")->required();
  export_cmd->add_flag("--activations", export_opt.activations, "Export activations");
  export_cmd->add_option("--attention", export_opt.attention, "spectral | temporal");
  export_cmd->add_option("--head", export_opt.head, "Attention head");
  export_cmd->add_option("--branch", export_opt.branch, "Single head of a fusion model (0 or 1)");
  add_common(export_cmd, common);

  SynthOptions synth_opt;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic click-track corpus");
  synth_cmd->add_option("--out", synth_opt.out, "Output directory")->required();
  synth_cmd->add_option("--train", synth_opt.spec.n_train, "Training clips");
  synth_cmd->add_option("--valid", synth_opt.spec.n_valid, "Validation clips");
  synth_cmd->add_option("--test", synth_opt.spec.n_test, "Test clips");
  synth_cmd->add_option("--min-bpm", synth_opt.spec.min_bpm, "Lowest tempo");
  synth_cmd->add_option("--max-bpm", synth_opt.spec.max_bpm, "Highest tempo");
  synth_cmd->add_option("--duration", synth_opt.spec.duration, "Clip length (s)");
  synth_cmd->add_option("--noise", synth_opt.spec.noise, "White-noise std");
  add_common(synth_cmd, common);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*track_cmd) return cmd_track(track_opt, common);
    if (*train_cmd) return cmd_train(train_opt, common);
    if (*eval_cmd) return cmd_evaluate(eval_opt, common);
    if (*export_cmd) return cmd_export(export_opt, common);
    if (*synth_cmd) return cmd_synth(synth_opt, common);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace beatforge::cli
