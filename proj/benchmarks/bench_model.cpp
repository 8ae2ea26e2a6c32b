/* Copyright 2026 The SST Authors. All Rights Reserved.

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

#include <benchmark/benchmark.h>

#include "sst/dataset.hpp"
#include "sst/model.hpp"
#include "sst/optim.hpp"
#include "sst/rng.hpp"
#include "sst/selftrain.hpp"

namespace {

const char* kSpecs[] = {"linear", "mlp:32", "mlp:128", "mlp:256x128"};

sst::Matrix gaussian_rows(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  sst::SplitMix64 rng(seed);
  sst::Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

void BM_Forward(benchmark::State& state) {
  const sst::Model m = sst::init_model(sst::parse_hypothesis(kSpecs[state.range(0)], 20, 20), 1);
  const sst::Matrix x = gaussian_rows(state.range(1), 20, 2);
  for (auto _ : state) benchmark::DoNotOptimize(sst::forward(m, x));
  state.SetItemsProcessed(state.iterations() * state.range(1));
  state.SetLabel(kSpecs[state.range(0)]);
}
BENCHMARK(BM_Forward)->ArgsProduct({{0, 1, 2, 3}, {64, 1024}});

void BM_Gradients(benchmark::State& state) {
  const sst::Model m = sst::init_model(sst::parse_hypothesis(kSpecs[state.range(0)], 20, 20), 1);
  const sst::Matrix x = gaussian_rows(64, 20, 3);
  std::vector<std::int32_t> y(64);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = static_cast<std::int32_t>(i % 20);
  for (auto _ : state) benchmark::DoNotOptimize(sst::gradients(m, x, y));
  state.SetItemsProcessed(state.iterations() * 64);
  state.SetLabel(kSpecs[state.range(0)]);
}
BENCHMARK(BM_Gradients)->DenseRange(0, 3);

void BM_PseudoLabel(benchmark::State& state) {
  const sst::Model m = sst::init_model(sst::parse_hypothesis("mlp:256x128", 20, 20), 1);
  sst::UnlabeledSlice u;
  u.features = gaussian_rows(14000, 20, 4);
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sst::pseudo_label(m, u, threads));
  state.SetItemsProcessed(state.iterations() * 14000);
}
BENCHMARK(BM_PseudoLabel)->Arg(1)->Arg(2)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

}  // namespace
