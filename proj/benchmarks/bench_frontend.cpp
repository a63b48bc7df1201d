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
#include <benchmark/benchmark.h>

#include "beatforge/audio_io.hpp"
#include "beatforge/frontend.hpp"

namespace beatforge {
namespace {

void BM_StftMagnitude(benchmark::State& state) {
  const auto [clip, ann] = synth_clicks(120.0, 4, static_cast<double>(state.range(0)), 16000);
  const FrontendConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(stft_magnitude(clip.samples, cfg, cfg.base_hop));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(clip.samples.size()));
}
BENCHMARK(BM_StftMagnitude)->Arg(6)->Arg(24)->Unit(benchmark::kMillisecond);

void BM_HarmonicRepresentation(benchmark::State& state) {
  const auto [clip, ann] = synth_clicks(120.0, 4, static_cast<double>(state.range(0)), 16000);
  const FeatureExtractor extractor{FrontendConfig{}};
  for (auto _ : state) benchmark::DoNotOptimize(extractor.compute(clip, 320));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(clip.samples.size()));
}
BENCHMARK(BM_HarmonicRepresentation)->Arg(6)->Arg(24)->Unit(benchmark::kMillisecond);

void BM_ComputeWindow(benchmark::State& state) {
  const auto [clip, ann] = synth_clicks(120.0, 4, 30.0, 16000);
  const FeatureExtractor extractor{FrontendConfig{}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(extractor.compute_window(clip.samples, 16000, 300, 336));
  }
}
BENCHMARK(BM_ComputeWindow)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace beatforge

BENCHMARK_MAIN();
