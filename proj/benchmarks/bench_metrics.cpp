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
#include <vector>

#include <benchmark/benchmark.h>

#include "beatforge/metrics.hpp"

namespace beatforge {
namespace {

std::pair<std::vector<double>, std::vector<double>> sequences(std::size_t n) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> jitter(0.0, 0.03);
  std::vector<double> ref, est;
  for (std::size_t i = 0; i < n; ++i) {
    ref.push_back(0.5 * static_cast<double>(i));
    est.push_back(0.5 * static_cast<double>(i) + jitter(rng));
  }
  return {est, ref};
}

void BM_FMeasure(benchmark::State& state) {
  const auto [est, ref] = sequences(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(f_measure(est, ref, 0.07));
}
BENCHMARK(BM_FMeasure)->Arg(100)->Arg(1000);

void BM_ContinuityScores(benchmark::State& state) {
  const auto [est, ref] = sequences(static_cast<std::size_t>(state.range(0)));
  const MetricConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(continuity_scores(est, ref, cfg));
}
BENCHMARK(BM_ContinuityScores)->Arg(100)->Arg(1000);

}  // namespace
}  // namespace beatforge

BENCHMARK_MAIN();
