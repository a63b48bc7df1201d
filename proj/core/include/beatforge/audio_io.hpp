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

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace beatforge {

/// Mono PCM audio with amplitudes nominally in [-1, 1].
struct AudioClip {
  std::vector<double> samples;
  int sample_rate = 0;

  double duration() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

/// One annotated beat. `bar_position` 1 marks a downbeat; 0 means the position
/// in the bar is unknown (the event still counts as a beat).
struct BeatEvent {
  double time = 0.0;
  int bar_position = 0;

  bool is_downbeat() const { return bar_position == 1; }
  friend bool operator==(const BeatEvent&, const BeatEvent&) = default;
};

struct BeatAnnotation {
  std::vector<BeatEvent> events;

  std::vector<double> beat_times() const;
  std::vector<double> downbeat_times() const;
  bool empty() const { return events.empty(); }
};

enum class Split { kTrain, kValid, kTest };

std::string_view to_string(Split split);
Split parse_split(std::string_view text);

struct ManifestEntry {
  std::filesystem::path audio_path;
  std::filesystem::path annotation_path;
  Split split = Split::kTrain;
  bool resolvable = true;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;

  std::vector<ManifestEntry> with_split(Split split) const;
  /// Entries whose audio or annotation file does not exist.
  std::vector<ManifestEntry> unresolved() const;
};

enum class WavEncoding { kPcm16, kFloat32 };

AudioClip load_wav(const std::filesystem::path& path);
void write_wav(const std::filesystem::path& path, const AudioClip& clip,
               WavEncoding encoding = WavEncoding::kPcm16);

/// Decodes an in-memory RIFF/WAVE image; stereo (or wider) input is averaged.
AudioClip decode_wav(std::span<const std::uint8_t> bytes);

/// Band-limited resampling with a 32-tap Hann-windowed sinc kernel. Output
/// length is round(len * target / source).
AudioClip resample(const AudioClip& clip, int target_rate);

BeatAnnotation parse_annotation(const std::filesystem::path& path);
BeatAnnotation parse_annotation_text(std::string_view text);
std::string serialize_annotation(const BeatAnnotation& annotation);
void write_annotation(const std::filesystem::path& path, const BeatAnnotation& annotation);

/// Loads a manifest either as JSON (array of objects or {"entries": [...]}
/// with audio_path/annotation_path/split) or as whitespace-separated lines
/// "audio annotation split". Relative paths resolve against the manifest's
/// directory.
DatasetManifest load_manifest(const std::filesystem::path& path);
void write_manifest_json(const std::filesystem::path& path, const DatasetManifest& manifest);

/// Click track: a decaying 1 kHz burst at every beat, downbeats 6 dB louder.
/// The returned annotation matches the click onsets exactly.
std::pair<AudioClip, BeatAnnotation> synth_clicks(double tempo_bpm, int meter, double duration_s,
                                                  int sample_rate);

}  // namespace beatforge
