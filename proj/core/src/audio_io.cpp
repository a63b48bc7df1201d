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

#include "beatforge/audio_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "beatforge/errors.hpp"
#include "beatforge/matrix.hpp"

namespace beatforge {

std::vector<double> BeatAnnotation::beat_times() const {
  std::vector<double> out;
  out.reserve(events.size());
  for (const auto& e : events) out.push_back(e.time);
  return out;
}

std::vector<double> BeatAnnotation::downbeat_times() const {
  std::vector<double> out;
  for (const auto& e : events) {
    if (e.is_downbeat()) out.push_back(e.time);
  }
  return out;
}

std::string_view to_string(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kValid: return "valid";
    case Split::kTest: return "test";
  }
  return "train";
}

Split parse_split(std::string_view text) {
  if (text == "train") return Split::kTrain;
  if (text == "valid" || text == "validation") return Split::kValid;
  if (text == "test") return Split::kTest;
  throw Error(ErrorCode::kInvalidArgument, "unknown split tag '" + std::string(text) + "'");
}

std::vector<ManifestEntry> DatasetManifest::with_split(Split split) const {
  std::vector<ManifestEntry> out;
  std::copy_if(entries.begin(), entries.end(), std::back_inserter(out),
               [split](const ManifestEntry& e) { return e.split == split; });
  return out;
}

std::vector<ManifestEntry> DatasetManifest::unresolved() const {
  std::vector<ManifestEntry> out;
  std::copy_if(entries.begin(), entries.end(), std::back_inserter(out),
               [](const ManifestEntry& e) { return !e.resolvable; });
  return out;
}

// ---------------------------------------------------------------------------
// WAV

namespace {

std::uint16_t read_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t read_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xfffe;

}  // namespace

AudioClip decode_wav(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw Error(ErrorCode::kUnsupportedFormat, "not a RIFF/WAVE file");
  }

  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t rate = 0;
  std::uint16_t bits = 0;
  const std::uint8_t* data = nullptr;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* chunk = bytes.data() + pos;
    const std::uint32_t size = read_u32(chunk + 4);
    const std::size_t body = pos + 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || body + size > bytes.size()) {
        throw Error(ErrorCode::kCorruptFile, "truncated fmt chunk");
      }
      format = read_u16(bytes.data() + body);
      channels = read_u16(bytes.data() + body + 2);
      rate = read_u32(bytes.data() + body + 4);
      bits = read_u16(bytes.data() + body + 14);
      if (format == kFormatExtensible) {
        if (size < 26) throw Error(ErrorCode::kCorruptFile, "truncated extensible fmt chunk");
        format = read_u16(bytes.data() + body + 24);
      }
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.data() + body;
      // Some writers leave the size field at its maximum for streamed output.
      data_size = std::min<std::size_t>(size, bytes.size() - body);
    }
    pos = body + size + (size & 1u);
  }

  if (channels == 0 || rate == 0) throw Error(ErrorCode::kCorruptFile, "missing fmt chunk");
  if (data == nullptr) throw Error(ErrorCode::kCorruptFile, "missing data chunk");

  const bool pcm16 = format == kFormatPcm && bits == 16;
  const bool float32 = format == kFormatFloat && bits == 32;
  if (!pcm16 && !float32) {
    throw Error(ErrorCode::kUnsupportedFormat,
                fmt::format("format tag {} with {} bits per sample", format, bits));
  }

  const std::size_t sample_bytes = bits / 8;
  const std::size_t frame_bytes = sample_bytes * channels;
  const std::size_t n_frames = data_size / frame_bytes;

  AudioClip clip;
  clip.sample_rate = static_cast<int>(rate);
  clip.samples.resize(n_frames);
  for (std::size_t i = 0; i < n_frames; ++i) {
    double acc = 0.0;
    for (std::size_t c = 0; c < channels; ++c) {
      const std::uint8_t* p = data + i * frame_bytes + c * sample_bytes;
      if (pcm16) {
        acc += static_cast<std::int16_t>(read_u16(p)) / 32768.0;
      } else {
        float v = 0.0f;
        std::memcpy(&v, p, sizeof(float));
        if (!std::isfinite(v)) throw Error(ErrorCode::kCorruptFile, "non-finite float sample");
        acc += v;
      }
    }
    clip.samples[i] = acc / channels;
  }
  return clip;
}

AudioClip load_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_wav(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void write_wav(const std::filesystem::path& path, const AudioClip& clip, WavEncoding encoding) {
  const bool pcm16 = encoding == WavEncoding::kPcm16;
  const std::uint16_t bits = pcm16 ? 16 : 32;
  const std::uint32_t data_size = static_cast<std::uint32_t>(clip.samples.size() * bits / 8);

  std::string out;
  out.reserve(44 + data_size);
  out += "RIFF";
  put_u32(out, 36 + data_size);
  out += "WAVEfmt ";
  put_u32(out, 16);
  put_u16(out, pcm16 ? kFormatPcm : kFormatFloat);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate) * bits / 8);
  put_u16(out, bits / 8);
  put_u16(out, bits);
  out += "data";
  put_u32(out, data_size);
  for (double s : clip.samples) {
    if (pcm16) {
      const double scaled = std::round(std::clamp(s, -1.0, 1.0) * 32768.0);
      put_u16(out, static_cast<std::uint16_t>(
                       static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0))));
    } else {
      const float v = static_cast<float>(s);
      char raw[sizeof(float)];
      std::memcpy(raw, &v, sizeof(float));
      out.append(raw, sizeof(float));
    }
  }
  write_file_atomic(path, {out.data(), out.size()});
}

// ---------------------------------------------------------------------------
// Resampling

AudioClip resample(const AudioClip& clip, int target_rate) {
  if (target_rate <= 0 || clip.sample_rate <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "sample rates must be positive");
  }
  if (target_rate == clip.sample_rate) return clip;

  constexpr int kHalfTaps = 16;
  const double ratio = static_cast<double>(clip.sample_rate) / target_rate;
  const double cutoff = std::min(1.0, 1.0 / ratio);
  const auto out_len = static_cast<std::size_t>(
      std::llround(static_cast<double>(clip.samples.size()) * target_rate / clip.sample_rate));
  const auto in_len = static_cast<std::ptrdiff_t>(clip.samples.size());

  AudioClip out;
  out.sample_rate = target_rate;
  out.samples.resize(out_len);
  for (std::size_t n = 0; n < out_len; ++n) {
    const double t = static_cast<double>(n) * ratio;
    const auto base = static_cast<std::ptrdiff_t>(std::floor(t));
    double acc = 0.0;
    double norm = 0.0;
    for (std::ptrdiff_t k = base - kHalfTaps + 1; k <= base + kHalfTaps; ++k) {
      const double u = t - static_cast<double>(k);
      const double x = cutoff * u;
      const double sinc = std::abs(x) < 1e-12 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
      const double window = 0.5 * (1.0 + std::cos(std::numbers::pi * u / kHalfTaps));
      const double h = sinc * window;
      norm += h;
      if (k >= 0 && k < in_len) acc += h * clip.samples[static_cast<std::size_t>(k)];
    }
    out.samples[n] = norm != 0.0 ? acc / norm : 0.0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Annotations

BeatAnnotation parse_annotation_text(std::string_view text) {
  BeatAnnotation ann;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;

    std::istringstream fields(line);
    BeatEvent event;
    if (!(fields >> event.time)) throw ParseError(line_no, "expected a time value");
    if (!std::isfinite(event.time) || event.time < 0.0) {
      throw ParseError(line_no, "time must be finite and non-negative");
    }
    std::string pos_token;
    if (fields >> pos_token) {
      // Positions like "1.0" appear in some corpora; accept integral reals.
      std::size_t used = 0;
      double pos = 0.0;
      try {
        pos = std::stod(pos_token, &used);
      } catch (const std::exception&) {
        throw ParseError(line_no, "bad bar position '" + pos_token + "'");
      }
      if (used != pos_token.size() || pos < 0.0 || pos != std::floor(pos)) {
        throw ParseError(line_no, "bad bar position '" + pos_token + "'");
      }
      event.bar_position = static_cast<int>(pos);
      std::string extra;
      if (fields >> extra) throw ParseError(line_no, "unexpected trailing field '" + extra + "'");
    }
    if (!ann.events.empty() && event.time <= ann.events.back().time) {
      throw Error(ErrorCode::kNonMonotonicTimes,
                  fmt::format("line {}: time {} does not follow {}", line_no, event.time,
                              ann.events.back().time));
    }
    ann.events.push_back(event);
  }
  return ann;
}

BeatAnnotation parse_annotation(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_annotation_text(text);
}

std::string serialize_annotation(const BeatAnnotation& annotation) {
  std::string out;
  for (const auto& e : annotation.events) {
    if (e.bar_position > 0) {
      out += fmt::format("{:.6f}\t{}\n", e.time, e.bar_position);
    } else {
      out += fmt::format("{:.6f}\n", e.time);
    }
  }
  return out;
}

void write_annotation(const std::filesystem::path& path, const BeatAnnotation& annotation) {
  const std::string text = serialize_annotation(annotation);
  write_file_atomic(path, {text.data(), text.size()});
}

// ---------------------------------------------------------------------------
// Manifests

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open manifest " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto base = path.parent_path();

  DatasetManifest manifest;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (text[first] == '[' || text[first] == '{')) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kCorruptFile, path.string() + ": " + e.what());
    }
    const nlohmann::json& list = doc.is_object() ? doc.at("entries") : doc;
    for (const auto& item : list) {
      try {
        manifest.entries.push_back(
            {resolve(base, item.at("audio_path").get<std::string>()),
             resolve(base, item.at("annotation_path").get<std::string>()),
             parse_split(item.value("split", std::string("train")))});
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kCorruptFile, path.string() + ": " + e.what());
      }
    }
  } else {
    std::istringstream lines(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(lines, line)) {
      ++line_no;
      const auto start = line.find_first_not_of(" \t\r");
      if (start == std::string::npos || line[start] == '#') continue;
      std::istringstream fields(line);
      std::string audio, annotation, split = "train";
      if (!(fields >> audio >> annotation)) {
        throw ParseError(line_no, "expected 'audio_path annotation_path [split]'");
      }
      fields >> split;
      manifest.entries.push_back(
          {resolve(base, audio), resolve(base, annotation), parse_split(split)});
    }
  }

  std::set<std::filesystem::path> seen;
  for (auto& e : manifest.entries) {
    if (!seen.insert(e.audio_path).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate manifest entry " + e.audio_path.string());
    }
    e.resolvable = std::filesystem::exists(e.audio_path) && std::filesystem::exists(e.annotation_path);
  }
  return manifest;
}

void write_manifest_json(const std::filesystem::path& path, const DatasetManifest& manifest) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& e : manifest.entries) {
    list.push_back({{"audio_path", e.audio_path.string()},
                    {"annotation_path", e.annotation_path.string()},
                    {"split", std::string(to_string(e.split))}});
  }
  const std::string text = list.dump(2) + "\n";
  write_file_atomic(path, {text.data(), text.size()});
}

// ---------------------------------------------------------------------------
// Click tracks

std::pair<AudioClip, BeatAnnotation> synth_clicks(double tempo_bpm, int meter, double duration_s,
                                                  int sample_rate) {
  if (!(tempo_bpm >= 40.0 && tempo_bpm <= 300.0)) {
    throw Error(ErrorCode::kInvalidArgument, "tempo must lie in [40, 300] BPM");
  }
  if (meter < 1 || duration_s <= 0.0 || sample_rate <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "meter >= 1, duration > 0 and rate > 0 required");
  }

  constexpr double kBeatAmplitude = 0.25;
  constexpr double kDecaySeconds = 0.008;
  constexpr double kClickSeconds = 0.06;
  constexpr double kClickHz = 1000.0;
  const double downbeat_amplitude = kBeatAmplitude * std::pow(10.0, 6.0 / 20.0);

  AudioClip clip;
  clip.sample_rate = sample_rate;
  clip.samples.assign(static_cast<std::size_t>(std::llround(duration_s * sample_rate)), 0.0);

  BeatAnnotation ann;
  const double period = 60.0 / tempo_bpm;
  const auto click_len = static_cast<std::size_t>(kClickSeconds * sample_rate);
  for (std::size_t i = 0;; ++i) {
    const double t = static_cast<double>(i) * period;
    if (t >= duration_s) break;
    const int position = static_cast<int>(i % static_cast<std::size_t>(meter)) + 1;
    ann.events.push_back({t, position});

    const double amplitude = position == 1 ? downbeat_amplitude : kBeatAmplitude;
    const auto onset = static_cast<std::size_t>(std::llround(t * sample_rate));
    for (std::size_t n = 0; n < click_len && onset + n < clip.samples.size(); ++n) {
      const double dt = static_cast<double>(n) / sample_rate;
      clip.samples[onset + n] +=
          amplitude * std::exp(-dt / kDecaySeconds) * std::cos(2.0 * std::numbers::pi * kClickHz * dt);
    }
  }
  return {std::move(clip), std::move(ann)};
}

}  // namespace beatforge
