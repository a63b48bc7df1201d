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

#include "beatforge/dbn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <tuple>

#include "beatforge/errors.hpp"
#include "beatforge/json_util.hpp"

namespace beatforge {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kFloor = 1e-12;

template <typename C, typename V>
void dbn_fields(C& c, V&& visit) {
  visit("min_bpm", c.min_bpm);
  visit("max_bpm", c.max_bpm);
  visit("n_tempi", c.n_tempi);
  visit("tempo_change_prob", c.tempo_change_prob);
  visit("meters", c.meters);
  visit("observation_fraction", c.observation_fraction);
}

double safe_log(double p) { return std::log(std::max(p, kFloor)); }

/// Half-width of the observation window centred on each beat.
int window_half_width(int frames_per_beat, double fraction) {
  return std::max(1, static_cast<int>(std::lround(0.5 * frames_per_beat * fraction)));
}

/// Beat observed at `position`: 0 = none, 1 = the current beat, 2 = the next.
int observed_beat(int position, int frames_per_beat, int half) {
  if (position <= half) return 1;
  if (position >= frames_per_beat - half) return 2;
  return 0;
}

/// Lexicographic tie-break: lower tempo, earlier in the bar, smaller meter.
bool preferred(const BarState& a, const BarState& b) {
  const int pos_a = a.beat_in_bar * a.frames_per_beat + a.position;
  const int pos_b = b.beat_in_bar * b.frames_per_beat + b.position;
  return std::make_tuple(-a.frames_per_beat, pos_a, a.meter) <
         std::make_tuple(-b.frames_per_beat, pos_b, b.meter);
}

void check_input(const ActivationMatrix& act, const std::vector<int>& taus) {
  if (act.values.cols != 3) {
    throw Error(ErrorCode::kShapeMismatch, "activation matrix must have 3 columns");
  }
  if (act.frames() < static_cast<std::size_t>(taus.front())) {
    throw Error(ErrorCode::kTooShort, std::to_string(act.frames()) +
                                          " frames is shorter than one beat period (" +
                                          std::to_string(taus.front()) + " frames)");
  }
}

bool degenerate(const ActivationMatrix& act) {
  double peak = 0.0;
  for (std::size_t t = 0; t < act.frames(); ++t) {
    peak = std::max({peak, act.values(t, 0), act.values(t, 1)});
  }
  return peak < 1e-6;
}

/// Model definition shared by the reference decoder and score_path.
struct Model {
  const DbnConfig& cfg;
  std::vector<int> taus;

  int tempo_index(int tau) const {
    auto it = std::lower_bound(taus.begin(), taus.end(), tau);
    return (it != taus.end() && *it == tau) ? static_cast<int>(it - taus.begin()) : -1;
  }

  bool valid(const BarState& s) const {
    return std::find(cfg.meters.begin(), cfg.meters.end(), s.meter) != cfg.meters.end() &&
           tempo_index(s.frames_per_beat) >= 0 && s.position >= 0 &&
           s.position < s.frames_per_beat && s.beat_in_bar >= 0 && s.beat_in_bar < s.meter;
  }

  double log_transition(const BarState& from, const BarState& to) const {
    if (from.meter != to.meter) return kNegInf;
    if (from.position + 1 < from.frames_per_beat) {
      const bool advance = to.frames_per_beat == from.frames_per_beat &&
                           to.beat_in_bar == from.beat_in_bar &&
                           to.position == from.position + 1;
      return advance ? 0.0 : kNegInf;
    }
    if (to.position != 0 || to.beat_in_bar != (from.beat_in_bar + 1) % from.meter) {
      return kNegInf;
    }
    const int i = tempo_index(from.frames_per_beat);
    const int j = tempo_index(to.frames_per_beat);
    const int n = static_cast<int>(taus.size());
    if (i == j) return n == 1 ? 0.0 : std::log(1.0 - cfg.tempo_change_prob);
    if (std::abs(i - j) != 1) return kNegInf;
    const int neighbours = (i > 0 ? 1 : 0) + (i + 1 < n ? 1 : 0);
    return std::log(cfg.tempo_change_prob / neighbours);
  }

  double log_emission(const ActivationMatrix& act, std::size_t t, const BarState& s) const {
    const double beat = act.values(t, 0);
    const int half = window_half_width(s.frames_per_beat, cfg.observation_fraction);
    const int seen = observed_beat(s.position, s.frames_per_beat, half);
    if (seen == 0) return safe_log((1.0 - beat) / (1.0 / cfg.observation_fraction - 1.0));
    const int index = seen == 1 ? s.beat_in_bar : (s.beat_in_bar + 1) % s.meter;
    return safe_log(index == 0 ? act.values(t, 1) : beat);
  }

  std::vector<BarState> all_states() const {
    std::vector<BarState> states;
    for (int m : cfg.meters) {
      for (int tau : taus) {
        for (int b = 0; b < m; ++b) {
          for (int k = 0; k < tau; ++k) states.push_back({m, tau, k, b});
        }
      }
    }
    return states;
  }
};

DecodeResult finish(const ActivationMatrix& act, StatePath path, double score) {
  DecodeResult result;
  result.annotation = path_to_annotation(path, act.frame_rate);
  result.path = std::move(path);
  result.log_score = score;
  result.low_confidence = degenerate(act);
  return result;
}

}  // namespace

void DbnConfig::validate() const {
  if (!(min_bpm > 0.0) || !(min_bpm < max_bpm)) {
    throw Error(ErrorCode::kInvalidArgument, "dbn requires 0 < min_bpm < max_bpm");
  }
  if (!(tempo_change_prob > 0.0 && tempo_change_prob < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "tempo_change_prob must lie in (0, 1)");
  }
  if (meters.empty()) throw Error(ErrorCode::kInvalidArgument, "dbn needs at least one meter");
  for (int m : meters) {
    if (m < 1) throw Error(ErrorCode::kInvalidArgument, "meters must be positive");
  }
  if (!(observation_fraction > 0.0 && observation_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "observation_fraction must lie in (0, 1)");
  }
}

void to_json(nlohmann::json& j, const DbnConfig& cfg) {
  json_util::write_fields(j, cfg, [](auto& c, auto&& v) { dbn_fields(c, v); });
}

void from_json(const nlohmann::json& j, DbnConfig& cfg) {
  json_util::read_fields(j, cfg, [](auto& c, auto&& v) { dbn_fields(c, v); }, "dbn");
}

std::vector<int> tempo_states(const DbnConfig& cfg, double frame_rate) {
  cfg.validate();
  const int lo = static_cast<int>(std::ceil(60.0 * frame_rate / cfg.max_bpm - 1e-9));
  const int hi = static_cast<int>(std::floor(60.0 * frame_rate / cfg.min_bpm + 1e-9));
  if (lo < 1 || hi < lo) {
    throw Error(ErrorCode::kInvalidArgument, "tempo range holds no integer beat period at " +
                                                 std::to_string(frame_rate) + " fps");
  }
  std::vector<int> taus;
  const int available = hi - lo + 1;
  if (cfg.n_tempi == 0 || cfg.n_tempi >= static_cast<std::size_t>(available)) {
    for (int tau = lo; tau <= hi; ++tau) taus.push_back(tau);
    return taus;
  }
  const double step =
      cfg.n_tempi > 1 ? (std::log(hi) - std::log(lo)) / static_cast<double>(cfg.n_tempi - 1) : 0;
  for (std::size_t i = 0; i < cfg.n_tempi; ++i) {
    const int tau = static_cast<int>(std::lround(std::exp(std::log(lo) + step * i)));
    if (taus.empty() || taus.back() != tau) taus.push_back(tau);
  }
  return taus;
}

BeatAnnotation path_to_annotation(const StatePath& path, double frame_rate) {
  BeatAnnotation ann;
  for (std::size_t t = 0; t < path.size(); ++t) {
    if (path[t].position == 0) {
      ann.events.push_back({static_cast<double>(t) / frame_rate, path[t].beat_in_bar + 1});
    }
  }
  return ann;
}

DecodeResult decode(const ActivationMatrix& act, const DbnConfig& cfg) {
  const std::vector<int> taus = tempo_states(cfg, act.frame_rate);
  check_input(act, taus);
  const int n_tempi = static_cast<int>(taus.size());
  const std::size_t frames = act.frames();

  // One block per (meter, tempo); states inside ordered by (beat_in_bar, position).
  struct Block {
    int meter;
    int tempo;
    int tau;
    std::size_t offset;
    std::size_t wrap_offset;
  };
  std::vector<Block> blocks;
  std::vector<std::vector<std::size_t>> block_of(cfg.meters.size(),
                                                 std::vector<std::size_t>(n_tempi));
  std::size_t n_states = 0;
  std::size_t n_wrap = 0;
  for (std::size_t mi = 0; mi < cfg.meters.size(); ++mi) {
    for (int j = 0; j < n_tempi; ++j) {
      block_of[mi][j] = blocks.size();
      blocks.push_back({cfg.meters[mi], j, taus[j], n_states, n_wrap});
      n_states += static_cast<std::size_t>(cfg.meters[mi]) * taus[j];
      n_wrap += static_cast<std::size_t>(cfg.meters[mi]);
    }
  }

  const double stay = n_tempi == 1 ? 0.0 : std::log(1.0 - cfg.tempo_change_prob);
  auto log_move = [&](int from) {
    const int neighbours = (from > 0 ? 1 : 0) + (from + 1 < n_tempi ? 1 : 0);
    return std::log(cfg.tempo_change_prob / neighbours);
  };
  std::vector<int> half(n_tempi);
  for (int j = 0; j < n_tempi; ++j) half[j] = window_half_width(taus[j], cfg.observation_fraction);
  const double non_beat_scale = 1.0 / cfg.observation_fraction - 1.0;

  std::vector<double> delta(n_states);
  std::vector<double> next(n_states);
  std::vector<std::int16_t> back(frames * n_wrap, -1);

  auto emit_all = [&](std::size_t t, std::vector<double>& v) {
    const double l_down = safe_log(act.values(t, 1));
    const double l_beat = safe_log(act.values(t, 0));
    const double l_non = safe_log((1.0 - act.values(t, 0)) / non_beat_scale);
    for (const Block& blk : blocks) {
      for (int b = 0; b < blk.meter; ++b) {
        double* row = v.data() + blk.offset + static_cast<std::size_t>(b) * blk.tau;
        const double on = b == 0 ? l_down : l_beat;
        const double next_on = (b + 1) % blk.meter == 0 ? l_down : l_beat;
        const int h = half[blk.tempo];
        for (int k = 0; k < blk.tau; ++k) {
          const int seen = observed_beat(k, blk.tau, h);
          row[k] += seen == 1 ? on : seen == 2 ? next_on : l_non;
        }
      }
    }
  };

  std::fill(delta.begin(), delta.end(), std::log(1.0 / static_cast<double>(n_states)));
  emit_all(0, delta);

  for (std::size_t t = 1; t < frames; ++t) {
    for (std::size_t mi = 0; mi < cfg.meters.size(); ++mi) {
      for (int j = 0; j < n_tempi; ++j) {
        const Block& blk = blocks[block_of[mi][j]];
        for (int b = 0; b < blk.meter; ++b) {
          const std::size_t base = blk.offset + static_cast<std::size_t>(b) * blk.tau;
          for (int k = 1; k < blk.tau; ++k) next[base + k] = delta[base + k - 1];
          // Wrap into position 0: candidates in order of decreasing period so
          // that a strict comparison keeps the lower tempo on ties.
          const int prev_b = (b + blk.meter - 1) % blk.meter;
          double best = kNegInf;
          int arg = -1;
          for (int jp = std::min(j + 1, n_tempi - 1); jp >= std::max(j - 1, 0); --jp) {
            const Block& src = blocks[block_of[mi][jp]];
            const double lt = jp == j ? stay : log_move(jp);
            const double v =
                delta[src.offset + static_cast<std::size_t>(prev_b) * src.tau + src.tau - 1] + lt;
            if (v > best) {
              best = v;
              arg = jp;
            }
          }
          next[base] = best;
          back[t * n_wrap + blk.wrap_offset + b] = static_cast<std::int16_t>(arg);
        }
      }
    }
    emit_all(t, next);
    std::swap(delta, next);
  }

  // Best final state under the tie-break order.
  BarState best_state{};
  double best = kNegInf;
  bool have = false;
  for (const Block& blk : blocks) {
    for (int b = 0; b < blk.meter; ++b) {
      for (int k = 0; k < blk.tau; ++k) {
        const double v = delta[blk.offset + static_cast<std::size_t>(b) * blk.tau + k];
        const BarState s{blk.meter, blk.tau, k, b};
        if (!have || v > best || (v == best && preferred(s, best_state))) {
          best = v;
          best_state = s;
          have = true;
        }
      }
    }
  }

  StatePath path(frames);
  BarState s = best_state;
  std::size_t mi = static_cast<std::size_t>(
      std::find(cfg.meters.begin(), cfg.meters.end(), s.meter) - cfg.meters.begin());
  int j = static_cast<int>(std::lower_bound(taus.begin(), taus.end(), s.frames_per_beat) -
                           taus.begin());
  for (std::size_t t = frames; t-- > 0;) {
    path[t] = s;
    if (t == 0) break;
    if (s.position > 0) {
      --s.position;
    } else {
      const Block& blk = blocks[block_of[mi][j]];
      j = back[t * n_wrap + blk.wrap_offset + s.beat_in_bar];
      s.frames_per_beat = taus[j];
      s.position = taus[j] - 1;
      s.beat_in_bar = (s.beat_in_bar + s.meter - 1) % s.meter;
    }
  }
  return finish(act, std::move(path), best);
}

DecodeResult brute_force_decode(const ActivationMatrix& act, const DbnConfig& cfg) {
  Model model{cfg, tempo_states(cfg, act.frame_rate)};
  check_input(act, model.taus);
  const std::vector<BarState> states = model.all_states();
  const std::size_t n = states.size();
  const std::size_t frames = act.frames();
  if (static_cast<double>(n) * static_cast<double>(frames) > 1e7) {
    throw Error(ErrorCode::kInvalidArgument, "state space too large for the reference decoder");
  }

  std::vector<double> trans(n * n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) trans[a * n + b] = model.log_transition(states[a], states[b]);
  }

  std::vector<double> delta(n, std::log(1.0 / static_cast<double>(n)));
  for (std::size_t s = 0; s < n; ++s) delta[s] += model.log_emission(act, 0, states[s]);
  std::vector<std::vector<std::uint32_t>> back(frames, std::vector<std::uint32_t>(n, 0));
  std::vector<double> next(n);
  for (std::size_t t = 1; t < frames; ++t) {
    for (std::size_t s = 0; s < n; ++s) {
      double best = kNegInf;
      std::size_t arg = n;
      for (std::size_t p = 0; p < n; ++p) {
        if (trans[p * n + s] == kNegInf) continue;
        const double v = delta[p] + trans[p * n + s];
        if (arg == n || v > best || (v == best && preferred(states[p], states[arg]))) {
          best = v;
          arg = p;
        }
      }
      next[s] = best + model.log_emission(act, t, states[s]);
      back[t][s] = static_cast<std::uint32_t>(arg);
    }
    std::swap(delta, next);
  }

  std::size_t arg = 0;
  for (std::size_t s = 1; s < n; ++s) {
    if (delta[s] > delta[arg] || (delta[s] == delta[arg] && preferred(states[s], states[arg]))) {
      arg = s;
    }
  }
  const double score = delta[arg];
  StatePath path(frames);
  for (std::size_t t = frames; t-- > 0;) {
    path[t] = states[arg];
    if (t > 0) arg = back[t][arg];
  }
  return finish(act, std::move(path), score);
}

double score_path(const ActivationMatrix& act, const DbnConfig& cfg, const StatePath& path) {
  Model model{cfg, tempo_states(cfg, act.frame_rate)};
  if (path.size() != act.frames() || path.empty()) {
    throw Error(ErrorCode::kShapeMismatch, "path length differs from activation length");
  }
  std::size_t n_states = 0;
  for (int m : cfg.meters) {
    for (int tau : model.taus) n_states += static_cast<std::size_t>(m) * tau;
  }
  double score = std::log(1.0 / static_cast<double>(n_states));
  for (std::size_t t = 0; t < path.size(); ++t) {
    if (!model.valid(path[t])) return kNegInf;
    if (t > 0) {
      const double lt = model.log_transition(path[t - 1], path[t]);
      if (lt == kNegInf) return kNegInf;
      score += lt;
    }
    score += model.log_emission(act, t, path[t]);
  }
  return score;
}

}  // namespace beatforge
