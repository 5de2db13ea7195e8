/* Copyright 2026 The sepq Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "sepq/allocator.h"
#include "sepq/feature_store.h"
#include "sepq/model.h"
#include "sepq/quantizer.h"
#include "sepq/separability.h"

namespace {

using namespace sepq;  // NOLINT

const std::filesystem::path kFixtures = SEPQ_FIXTURE_DIR;

void BM_ScoreLayer(benchmark::State& state) {
  const auto features = static_cast<std::size_t>(state.range(0));
  const auto images = static_cast<std::size_t>(state.range(1));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PooledFeatures pooled;
  pooled.values = Matrix(features, images);
  for (std::size_t i = 0; i < features; ++i) {
    for (std::size_t j = 0; j < images; ++j) pooled.values(i, j) = u(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(ScoreLayer(pooled).alpha);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(features * images));
}
BENCHMARK(BM_ScoreLayer)->Args({64, 32})->Args({512, 32})->Args({2048, 128});

void BM_SolveLp(benchmark::State& state) {
  const auto layers = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<std::int64_t> params(1000, 1000000);
  std::uniform_real_distribution<double> theta(0.5, 2.0);
  std::vector<LayerProfile> profiles;
  ImportanceVector imp;
  for (std::size_t i = 0; i < layers; ++i) {
    profiles.push_back({"l" + std::to_string(i), params(rng), params(rng), {}});
    imp.theta.push_back(theta(rng));
  }
  imp.alpha.assign(layers, 0.0);
  std::vector<int> w8(layers, 8);
  const auto budget = Budget::Bytes(0.6 * ModelSizeBytes(w8, profiles));
  for (auto _ : state) benchmark::DoNotOptimize(SolveLp(imp, profiles, budget, {2, 8}));
}
BENCHMARK(BM_SolveLp)->Arg(20)->Arg(200)->Arg(2000);

void BM_QuantizeDequantize(benchmark::State& state) {
  const auto n = state.range(0);
  std::mt19937_64 rng(3);
  std::normal_distribution<float> normal(0.0f, 1.0f);
  std::vector<float> data(static_cast<std::size_t>(n));
  for (auto& v : data) v = normal(rng);
  const Tensor w("w", {n}, data);
  for (auto _ : state) benchmark::DoNotOptimize(QuantizeDequantize(w, 4));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_QuantizeDequantize)->Arg(1 << 12)->Arg(1 << 20);

void BM_ForwardFixture(benchmark::State& state) {
  const auto model = ModelGraph::Load(kFixtures / "model.json");
  const auto dataset = ReadContainer(kFixtures / "dataset.fmap");
  const Tensor& images = dataset.Get("images");
  const auto batch = state.range(0);
  const auto& s = images.shape();
  const std::int64_t per_image = s[1] * s[2] * s[3];
  std::vector<float> data(images.data().begin(), images.data().begin() + batch * per_image);
  const Tensor input("x", {batch, s[1], s[2], s[3]}, data);
  for (auto _ : state) benchmark::DoNotOptimize(Forward(model, input, true));
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_ForwardFixture)->Arg(1)->Arg(32)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
