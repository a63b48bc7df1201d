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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "beatforge/errors.hpp"
#include "beatforge/frontend.hpp"
#include "beatforge/models/fusion.hpp"
#include "beatforge/nn/ops.hpp"
#include "beatforge/training.hpp"
#include "gradcheck.hpp"

namespace beatforge::models {
namespace {

using nn::Tensor;
using testing::grad_check;
using testing::random_tensor;

FusionConfig tiny_config() {
  FusionConfig cfg;
  cfg.spectnt.n_bands = 16;
  cfg.spectnt.spectral_dim = 8;
  cfg.spectnt.spectral_heads = 2;
  cfg.spectnt.temporal_dim = 16;
  cfg.spectnt.temporal_heads = 4;
  cfg.spectnt.frontend_channels = 4;
  cfg.spectnt.dropout = 0.0;
  cfg.tcn.n_layers = 2;
  cfg.tcn.channels = 4;
  cfg.tcn.dropout = 0.0;
  cfg.front_blocks = 1;
  cfg.tail_blocks = 1;
  cfg.chunk_seconds = 0.2;
  cfg.n_chunks = 4;
  cfg.input_seconds = 0.8;
  cfg.enforce_duration = false;
  return cfg;
}

std::vector<Tensor> param_tensors(const nn::ParamStore& store) {
  std::vector<Tensor> out;
  for (const auto& p : store.parameters()) out.push_back(p.tensor);
  return out;
}

bool is_shared(const std::string& name) {
  return name.starts_with("embed.") || name.starts_with("front");
}

TargetMatrix random_targets(std::size_t frames, std::mt19937_64& rng) {
  BeatAnnotation ann;
  for (std::size_t t = 2; t + 2 < frames; t += 3 + rng() % 4) {
    ann.events.push_back({static_cast<double>(t) / 50.0, static_cast<int>(rng() % 3)});
  }
  return build_targets(ann, frames, 50.0);
}

std::vector<std::vector<double>> shared_grads(FusionModel& model, const Tensor& x,
                                              const TargetMatrix& targets, double wa, double wb) {
  model.params().zero_grad();
  const auto out = model.forward(x, {});
  const Tensor la = weighted_bce(out.branch_logits[0], targets);
  const Tensor lb = weighted_bce(out.branch_logits[1], targets);
  Tensor total = nn::add(nn::scale(la, wa), nn::scale(lb, wb));
  total.backward();
  std::vector<std::vector<double>> grads;
  for (const auto& p : model.params().parameters()) {
    if (!is_shared(p.name)) continue;
    if (p.tensor.has_grad()) {
      grads.emplace_back(p.tensor.grad().begin(), p.tensor.grad().end());
    } else {
      grads.emplace_back(p.tensor.numel(), 0.0);
    }
  }
  return grads;
}

TEST(FusionConfig, ChunksMustTileInput) {
  FusionConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.n_chunks = 3;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(FusionModel, ParamCountNearTarget) {
  const FusionModel model(FusionConfig{});
  const double target = 4692896.0;
  EXPECT_LE(std::abs(static_cast<double>(model.param_count()) - target), 0.1 * target)
      << model.param_count();
}

TEST(FusionModel, BranchShapesAndAverage) {
  const FusionModel model(tiny_config(), 1);
  std::mt19937_64 rng(1);
  nn::NoGradGuard guard;
  const auto out = model.forward(random_tensor({40, 16}, rng), {});
  ASSERT_EQ(out.branch_logits.size(), 2u);
  EXPECT_EQ(out.branch_logits[0].shape(), (nn::Shape{40, 3}));
  EXPECT_EQ(out.branch_logits[1].shape(), (nn::Shape{40, 3}));
  const Matrix avg = activations(out);
  for (std::size_t i = 0; i < avg.data.size(); ++i) {
    const double a = out.branch_logits[0].data()[i], b = out.branch_logits[1].data()[i];
    EXPECT_NEAR(avg.data[i], (1.0 / (1.0 + std::exp(-a)) + 1.0 / (1.0 + std::exp(-b))) / 2.0, 1e-15);
    EXPECT_GE(avg.data[i], 0.0);
    EXPECT_LE(avg.data[i], 1.0);
  }
}

TEST(FusionModel, AverageFormulaForArbitraryLogits) {
  std::mt19937_64 rng(2);
  const Tensor a = random_tensor({7, 3}, rng, 5.0), b = random_tensor({7, 3}, rng, 5.0);
  const Matrix avg = activations(ModelOutput{{a, b}});
  for (std::size_t i = 0; i < avg.data.size(); ++i) {
    const double sa = 1.0 / (1.0 + std::exp(-a.data()[i])), sb = 1.0 / (1.0 + std::exp(-b.data()[i]));
    EXPECT_NEAR(avg.data[i], (sa + sb) / 2.0, 1e-15);
  }
  const Matrix only_b = activations(ModelOutput{{a, b}}, 1);
  EXPECT_NEAR(only_b.data[0], 1.0 / (1.0 + std::exp(-b.data()[0])), 1e-15);
}

TEST(FusionModel, FullSizeDurationCheck) {
  FusionConfig cfg = tiny_config();
  cfg.input_seconds = 24.0;
  cfg.chunk_seconds = 6.0;
  cfg.enforce_duration = true;
  const FusionModel model(cfg);
  EXPECT_EQ(model.input_frames(), 1200u);
  EXPECT_EQ(model.chunk_bounds(1200, 2), (std::pair<std::size_t, std::size_t>{600, 900}));
  try {
    nn::NoGradGuard guard;
    model.forward(Tensor::zeros({300, 16}), {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kWrongDuration);
  }
}

TEST(FusionModel, ChunkBoundsPreserveGlobalIndex) {
  FusionConfig cfg = tiny_config();
  cfg.input_seconds = 24.0;
  cfg.chunk_seconds = 6.0;
  const FusionModel model(cfg);
  for (std::size_t c = 0; c < 4; ++c) {
    const auto [begin, end] = model.chunk_bounds(1200, c);
    EXPECT_EQ(begin, c * 300);
    EXPECT_EQ(end - begin, 300u);
  }
}

TEST(FusionModel, SpectralBranchIsChunkLocal) {
  const FusionModel model(tiny_config(), 3);
  std::mt19937_64 rng(3);
  const Tensor x = random_tensor({40, 16}, rng);
  Tensor y = x.clone();
  for (std::size_t i = 0; i < 10 * 16; ++i) y.data()[i] += 1.0;
  nn::NoGradGuard guard;
  const auto a = model.forward(x, {}), b = model.forward(y, {});
  for (std::size_t i = 10 * 3; i < 40 * 3; ++i) {
    EXPECT_EQ(a.branch_logits[0].data()[i], b.branch_logits[0].data()[i]);
  }
  bool tcn_changed = false;
  for (std::size_t i = 20 * 3; i < 40 * 3; ++i) {
    tcn_changed |= a.branch_logits[1].data()[i] != b.branch_logits[1].data()[i];
  }
  EXPECT_TRUE(tcn_changed);
}

TEST(FusionModel, TailPerturbationLeavesTcnBitIdentical) {
  FusionModel model(tiny_config(), 4);
  std::mt19937_64 rng(4);
  const Tensor x = random_tensor({40, 16}, rng);
  nn::NoGradGuard guard;
  const Tensor before = model.forward(x, {}).branch_logits[1].clone();
  for (const auto& p : model.params().parameters()) {
    if (!p.name.starts_with("tail") && !p.name.starts_with("spectnt_head")) continue;
    Tensor t = p.tensor;
    for (double& v : t.data()) v += 0.3;
  }
  const auto after = model.forward(x, {});
  EXPECT_TRUE(std::equal(before.data().begin(), before.data().end(), after.branch_logits[1].data().begin()));
}

TEST(FusionModel, SharedGradientIsSumOfBranchGradients) {
  FusionModel model(tiny_config(), 5);
  std::mt19937_64 rng(5);
  const Tensor x = random_tensor({40, 16}, rng);
  const TargetMatrix targets = random_targets(40, rng);
  const auto ga = shared_grads(model, x, targets, 1.0, 0.0);
  const auto gb = shared_grads(model, x, targets, 0.0, 1.0);
  const auto gt = shared_grads(model, x, targets, 1.0, 1.0);
  std::vector<double> diff(gt.size(), 0.0), norm(gt.size(), 0.0);
  double total_diff = 0.0, total_norm = 0.0;
  for (std::size_t p = 0; p < gt.size(); ++p) {
    for (std::size_t i = 0; i < gt[p].size(); ++i) {
      const double e = gt[p][i] - (ga[p][i] + gb[p][i]);
      diff[p] += e * e;
      norm[p] += gt[p][i] * gt[p][i];
    }
    total_diff += diff[p];
    total_norm += norm[p];
  }
  ASSERT_GT(total_norm, 0.0);
  EXPECT_LT(std::sqrt(total_diff / total_norm), 1e-10);
  std::size_t checked = 0;
  for (std::size_t p = 0; p < gt.size(); ++p) {
    if (norm[p] <= 1e-16 * total_norm) continue;
    ++checked;
    EXPECT_LT(std::sqrt(diff[p] / norm[p]), 1e-10) << "tensor " << p;
  }
  EXPECT_GT(checked, gt.size() / 2);
}

TEST(FusionModel, FrozenBranchContributesNothing) {
  FusionModel model(tiny_config(), 6);
  std::mt19937_64 rng(6);
  const Tensor x = random_tensor({40, 16}, rng);
  const TargetMatrix targets = random_targets(40, rng);
  const auto alone = shared_grads(model, x, targets, 1.0, 0.0);
  model.params().zero_grad();
  const auto out = model.forward(x, {});
  weighted_bce(out.branch_logits[0], targets).backward();
  std::size_t k = 0;
  for (const auto& p : model.params().parameters()) {
    if (!is_shared(p.name)) continue;
    for (std::size_t i = 0; i < p.tensor.numel(); ++i) {
      EXPECT_EQ(alone[k][i], p.tensor.has_grad() ? p.tensor.grad()[i] : 0.0);
    }
    ++k;
  }
}

TEST(FusionModel, EndToEndGradCheck) {
  FusionModel model(tiny_config(), 7);
  std::mt19937_64 rng(7);
  const Tensor x = random_tensor({8, 16}, rng);
  const auto r = grad_check(
      [&](const auto&) {
        const auto out = model.forward(x, {});
        return nn::concat(out.branch_logits, 0);
      },
      param_tensors(model.params()), 60);
  EXPECT_LT(r.max_rel_error, 1e-6);
}

}  // namespace
}  // namespace beatforge::models
