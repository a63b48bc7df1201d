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

#include "beatforge/corpus.hpp"

#include <cstdio>
#include <random>

#include "beatforge/errors.hpp"

namespace beatforge {

std::vector<CorpusItem> make_click_corpus(const CorpusSpec& spec) {
  if (spec.meters.empty()) throw Error(ErrorCode::kInvalidArgument, "corpus needs a meter");
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> tempo(spec.min_bpm, spec.max_bpm);
  std::normal_distribution<double> noise(0.0, spec.noise > 0.0 ? spec.noise : 1.0);
  std::vector<CorpusItem> items;
  const std::size_t total = spec.n_train + spec.n_valid + spec.n_test;
  for (std::size_t i = 0; i < total; ++i) {
    CorpusItem item;
    item.split = i < spec.n_train ? Split::kTrain
                 : i < spec.n_train + spec.n_valid ? Split::kValid
                                                   : Split::kTest;
    item.tempo_bpm = tempo(rng);
    item.meter = spec.meters[i % spec.meters.size()];
    char name[64];
    std::snprintf(name, sizeof(name), "%s_%03zu", std::string(to_string(item.split)).c_str(), i);
    item.name = name;
    auto [clip, ann] = synth_clicks(item.tempo_bpm, item.meter, spec.duration, spec.sample_rate);
    if (spec.noise > 0.0) {
      for (double& s : clip.samples) s += spec.noise * noise(rng);
    }
    item.audio = std::move(clip);
    item.annotation = std::move(ann);
    items.push_back(std::move(item));
  }
  return items;
}

DatasetManifest write_corpus(const std::filesystem::path& dir,
                             const std::vector<CorpusItem>& items) {
  std::filesystem::create_directories(dir);
  const auto root = std::filesystem::absolute(dir);
  DatasetManifest manifest;
  for (const auto& item : items) {
    ManifestEntry entry;
    entry.audio_path = root / (item.name + ".wav");
    entry.annotation_path = root / (item.name + ".beats");
    entry.split = item.split;
    write_wav(entry.audio_path, item.audio);
    write_annotation(entry.annotation_path, item.annotation);
    manifest.entries.push_back(entry);
  }
  write_manifest_json(root / "manifest.json", manifest);
  return manifest;
}

}  // namespace beatforge
