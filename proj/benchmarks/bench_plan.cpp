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

#include "sst/plan.hpp"

namespace {

void BM_PlanCompare(benchmark::State& state) {
  const auto a = sst::reference_streaming_plan();
  const auto b = sst::reference_no_streaming_plan();
  for (auto _ : state) benchmark::DoNotOptimize(sst::plan_compare(a, b, 5.0));
}
BENCHMARK(BM_PlanCompare);

}  // namespace

BENCHMARK_MAIN();
