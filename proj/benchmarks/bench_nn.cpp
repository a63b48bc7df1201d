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

#include "beatforge/models/spectnt.hpp"
#include "beatforge/models/tcn.hpp"
#include "beatforge/nn/attention.hpp"
#include "beatforge/nn/conv.hpp"
#include "beatforge/nn/ops.hpp"

namespace beatforge {
namespace {

using nn::Tensor;

Tensor random_tensor(nn::Shape shape, std::mt19937_64& rng) {
  Tensor t = Tensor::zeros(shape);
  std::normal_distribution<double> n(0.0, 1.0);
  for (double& v : t.data()) v = n(rng);
  return t;
}

void BM_MatmulForwardBackward(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  Tensor a = random_tensor({n, n}, rng);
  Tensor b = random_tensor({n, n}, rng);
  a.set_requires_grad(true);
  b.set_requires_grad(true);
  for (auto _ : state) {
    Tensor loss = nn::sum(nn::matmul(a, b));
    loss.backward();
  }
}
BENCHMARK(BM_MatmulForwardBackward)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_Conv1dDilated(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const Tensor x = random_tensor({20, 1200}, rng);
  const Tensor w = random_tensor({20, 20, 5}, rng);
  const Tensor b = random_tensor({20}, rng);
  nn::NoGradGuard guard;
  for (auto _ : state) benchmark::DoNotOptimize(nn::conv1d(x, w, b, 16));
}
BENCHMARK(BM_Conv1dDilated)->Unit(benchmark::kMillisecond);

void BM_Conv2d(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const Tensor x = random_tensor({16, 64, 300}, rng);
  const Tensor w = random_tensor({16, 16, 3, 1}, rng);
  const Tensor b = random_tensor({16}, rng);
  nn::NoGradGuard guard;
  for (auto _ : state) benchmark::DoNotOptimize(nn::conv2d(x, w, b, {2, 1, 1, 0}));
}
BENCHMARK(BM_Conv2d)->Unit(benchmark::kMillisecond);

void BM_Attention(benchmark::State& state) {
  const auto len = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(4);
  const Tensor q = random_tensor({1, len, 256}, rng);
  const Tensor k = random_tensor({1, len, 256}, rng);
  const Tensor v = random_tensor({1, len, 256}, rng);
  nn::NoGradGuard guard;
  for (auto _ : state) benchmark::DoNotOptimize(nn::scaled_dot_product_attention(q, k, v, 8));
}
BENCHMARK(BM_Attention)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_TcnForward(benchmark::State& state) {
  const models::TcnModel model(models::TcnConfig{}, 1);
  std::mt19937_64 rng(5);
  const Tensor x = random_tensor({model.input_frames(), 128}, rng);
  nn::NoGradGuard guard;
  for (auto _ : state) benchmark::DoNotOptimize(model.forward(x, {}));
}
BENCHMARK(BM_TcnForward)->Unit(benchmark::kMillisecond);

void BM_TcnTrainingStep(benchmark::State& state) {
  const models::TcnModel model(models::TcnConfig{}, 1);
  std::mt19937_64 rng(6);
  const Tensor x = random_tensor({model.input_frames(), 128}, rng);
  for (auto _ : state) {
    Tensor loss = nn::mean(model.forward(x, {}).branch_logits[0]);
    loss.backward();
  }
}
BENCHMARK(BM_TcnTrainingStep)->Unit(benchmark::kMillisecond);

void BM_SpecTntForward(benchmark::State& state) {
  const models::SpecTntModel model(models::SpecTntConfig{}, 1);
  std::mt19937_64 rng(7);
  const Tensor x = random_tensor({model.input_frames(), 128}, rng);
  nn::NoGradGuard guard;
  for (auto _ : state) benchmark::DoNotOptimize(model.forward(x, {}));
}
BENCHMARK(BM_SpecTntForward)->Unit(benchmark::kMillisecond)->Iterations(2);

}  // namespace
}  // namespace beatforge

BENCHMARK_MAIN();
