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

#include "sst/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sst/error.hpp"
#include "sst/eval.hpp"
#include "sst/rng.hpp"

namespace sst {

BenchmarkSpec gaussian_benchmark_spec() {
  BenchmarkSpec b;
  b.mixture.kind = SynthKind::kGaussianMixture;
  b.mixture.num_classes = 20;
  b.mixture.dim = 20;
  b.mixture.separation = 5.0;
  b.n_per_class = 10;
  b.slice_sizes = {2000, 6000, 14000};
  b.test_size = 4000;
  return b;
}

BenchmarkSpec xor_benchmark_spec() {
  BenchmarkSpec b;
  b.mixture.kind = SynthKind::kXor;
  b.mixture.num_classes = 2;
  b.mixture.dim = 2;
  b.mixture.separation = 4.0;
  b.n_per_class = 10;
  b.slice_sizes = {2000, 6000, 14000};
  b.test_size = 4000;
  return b;
}

Benchmark make_benchmark(const BenchmarkSpec& spec, std::uint64_t seed) {
  Benchmark b;
  SynthSpec task = spec.mixture;
  task.num_samples = spec.n_per_class * static_cast<std::size_t>(task.num_classes) * 4;
  task.seed = derive_seed(seed, "bench_task");
  b.s = few_shot_sample(synthesize(task), spec.n_per_class, derive_seed(seed, "bench_fewshot"));

  std::size_t total = 0;
  for (auto s : spec.slice_sizes) total += s;
  SynthSpec pool = spec.mixture;
  pool.num_samples = std::max<std::size_t>(total, 1);
  pool.seed = derive_seed(seed, "bench_pool");
  b.slices = make_stream(synthesize(pool).features, spec.slice_sizes,
                         derive_seed(seed, "bench_stream"), "bench");

  SynthSpec test = spec.mixture;
  test.num_samples = spec.test_size;
  test.seed = derive_seed(seed, "bench_test");
  b.test = synthesize(test);

  if (spec.normalize) {
    const NormalizationStats stats = fit_normalization(b.s);
    b.s.features = apply_normalization(stats, b.s.features);
    for (auto& u : b.slices) u.features = apply_normalization(stats, u.features);
    b.test.features = apply_normalization(stats, b.test.features);
  }
  return b;
}

double gaussian_mixture_bayes_accuracy(const SynthSpec& spec) {
  if (spec.kind != SynthKind::kGaussianMixture)
    throw ValidationError("kind", "Bayes accuracy is implemented for gaussian_mixture only");
  auto phi_cdf = [](double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); };
  if (spec.num_classes == 2) return phi_cdf(spec.separation / 2.0);
  if (spec.dim < spec.num_classes)
    throw ValidationError("dim", "closed form needs the orthogonal layout (dim >= num_classes)");

  const double a = spec.separation / std::numbers::sqrt2;
  const int others = spec.num_classes - 1;
  auto integrand = [&](double u) {
    return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi) *
           std::pow(phi_cdf(u + a), others);
  };
  const double lo = -12.0, hi = 12.0;
  const int n = 20000;  // even
  const double h = (hi - lo) / n;
  double sum = integrand(lo) + integrand(hi);
  for (int i = 1; i < n; ++i) sum += integrand(lo + i * h) * (i % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

StreamConfigs desk_scale_configs(const std::vector<std::size_t>& slice_sizes,
                                 int finetune_epochs) {
  StreamConfigs c;
  c.init = TrainConfig::with_tail_decay(60, 32);
  c.finetune = TrainConfig::with_tail_decay(finetune_epochs, 32);
  for (std::size_t t = 0; t < slice_sizes.size(); ++t) {
    const int epochs = t == 0 ? 30 : t == 1 ? 20 : 15;
    TrainConfig p = TrainConfig::with_tail_decay(epochs, 64);
    p.match_decay_budget(reference_decay_budget(t), slice_sizes[t]);
    c.pretrain.push_back(p);
  }
  return c;
}

AblationResult capacity_ablation(const Benchmark& bench, const CapacitySchedule& schedule,
                                 const StreamConfigs& configs, std::uint64_t seed) {
  StreamOptions opt;
  opt.seed = seed;
  AblationResult r;
  r.baseline = stream_learning(bench.s, bench.slices,
                               fixed_schedule(schedule.specs.front(), schedule.iterations()),
                               configs, bench.test, opt)
                   .report;
  r.baseline.run_name = "fixed_capacity";
  r.stream = stream_learning(bench.s, bench.slices, schedule, configs, bench.test, opt).report;
  r.stream.run_name = "stream";
  r.table = format_comparison_table({{"fixed_capacity", &r.baseline}, {"stream", &r.stream}});
  return r;
}

AblationResult streaming_ablation(const Benchmark& bench, const CapacitySchedule& schedule,
                                  const StreamConfigs& configs, std::uint64_t seed) {
  StreamOptions opt;
  opt.seed = seed;
  AblationResult r;
  r.baseline = no_streaming_run(bench.s, bench.slices, schedule, configs, bench.test, opt).report;
  r.stream = stream_learning(bench.s, bench.slices, schedule, configs, bench.test, opt).report;
  r.table = format_comparison_table({{"no_stream", &r.baseline}, {"stream", &r.stream}});
  return r;
}

}  // namespace sst
