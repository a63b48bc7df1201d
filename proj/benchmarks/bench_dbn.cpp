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
#include <random>

#include <benchmark/benchmark.h>

#include "beatforge/dbn.hpp"

namespace beatforge {
namespace {

ActivationMatrix click_activations(std::size_t frames, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> noise(0.0, 0.05);
  ActivationMatrix act;
  act.frame_rate = 50.0;
  act.values = Matrix(frames, 3);
  for (std::size_t t = 0; t < frames; ++t) {
    const bool beat = t % 25 == 0;
    act.values(t, 0) = beat ? 0.95 : noise(rng);
    act.values(t, 1) = beat && t % 100 == 0 ? 0.95 : noise(rng);
    act.values(t, 2) = 1.0 - act.values(t, 0);
  }
  return act;
}

void BM_DecodeFullStateSpace(benchmark::State& state) {
  const ActivationMatrix act = click_activations(static_cast<std::size_t>(state.range(0)), 1);
  const DbnConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(decode(act, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DecodeFullStateSpace)->Arg(1500)->Arg(15000)->Unit(benchmark::kMillisecond);

void BM_DecodeVersusBruteForce(benchmark::State& state) {
  ActivationMatrix act = click_activations(200, 2);
  act.frame_rate = 10.0;
  const DbnConfig cfg;
  const bool brute = state.range(0) == 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(brute ? brute_force_decode(act, cfg) : decode(act, cfg));
  }
}
BENCHMARK(BM_DecodeVersusBruteForce)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace beatforge

BENCHMARK_MAIN();
