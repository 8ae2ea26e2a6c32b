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

#include "sst/selftrain.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

#include "sst/error.hpp"
#include "sst/eval.hpp"
#include "sst/rng.hpp"

namespace sst {

PseudoLabeledDataset pseudo_label(const Model& labeler, const UnlabeledSlice& slice,
                                  int threads) {
  if (slice.features.cols() != labeler.spec.input_dim)
    throw ShapeError("slice feature dim", labeler.spec.input_dim, slice.features.cols());

  PseudoLabeledDataset out;
  out.features = slice.features;
  out.num_classes = labeler.spec.num_classes;
  out.source_slice_index = slice.slice_index;
  out.labeler_fingerprint = fingerprint(labeler);

  const auto n = static_cast<std::size_t>(slice.features.rows());
  const auto workers = static_cast<std::size_t>(std::clamp<std::size_t>(
      static_cast<std::size_t>(std::max(threads, 1)), 1, std::max<std::size_t>(n / 256, 1)));
  if (workers == 1) {
    out.pseudo_labels = predict(labeler, slice.features);
    return out;
  }

  // Each row's label depends only on that row, so blocks are independent.
  out.pseudo_labels.resize(n);
  const std::size_t block = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * block;
    const std::size_t end = std::min(n, begin + block);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      const Matrix rows = slice.features.middleRows(static_cast<Eigen::Index>(begin),
                                                    static_cast<Eigen::Index>(end - begin));
      const Labels part = predict(labeler, rows);
      std::copy(part.begin(), part.end(), out.pseudo_labels.begin() + begin);
    });
  }
  for (auto& th : pool) th.join();
  return out;
}

void RunReport::validate() const {
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].t != static_cast<int>(i))
      throw ValidationError("records", "iteration index " + std::to_string(records[i].t) +
                                           " at position " + std::to_string(i));
    if (!(records[i].top1 >= 0.0 && records[i].top1 <= 1.0))
      throw ValidationError("records", "top1 outside [0, 1]");
  }
}

namespace {

double steady_seconds() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

TrainConfig stage_config(const TrainConfig& base, std::uint64_t seed, std::string_view tag,
                         std::uint64_t index) {
  TrainConfig c = base;
  c.seed = derive_seed(seed ^ SplitMix64::mix(base.seed), tag, index);
  return c;
}

void check_inputs(const LabeledDataset& s, std::span<const UnlabeledSlice> slices,
                  const CapacitySchedule& schedule, const LabeledDataset& eval_set) {
  s.validate();
  eval_set.validate();
  schedule.validate();
  const auto& init = schedule.specs.front();
  if (static_cast<int>(s.dim()) != init.input_dim)
    throw ShapeError("S feature dim", init.input_dim, static_cast<std::int64_t>(s.dim()));
  if (s.num_classes != init.num_classes)
    throw ShapeError("S num_classes", init.num_classes, s.num_classes);
  if (static_cast<int>(eval_set.dim()) != init.input_dim)
    throw ShapeError("eval feature dim", init.input_dim,
                     static_cast<std::int64_t>(eval_set.dim()));
  for (const auto& u : slices) {
    u.validate();
    if (static_cast<int>(u.dim()) != init.input_dim)
      throw ShapeError("slice " + std::to_string(u.slice_index) + " feature dim", init.input_dim,
                       static_cast<std::int64_t>(u.dim()));
  }
}

// Runs `fn`, rewrapping a divergence with the iteration it happened in.
template <typename Fn>
auto at_iteration(int t, const char* stage, Fn&& fn) {
  try {
    return fn();
  } catch (const DivergenceError& e) {
    throw DivergenceError(e.epoch(), e.lr(),
                          "iteration " + std::to_string(t) + " " + stage);
  }
}

IterationRecord init_iteration(const LabeledDataset& s, const CapacitySchedule& schedule,
                               const StreamConfigs& configs, const LabeledDataset& eval_set,
                               const StreamOptions& options, const std::function<double()>& clock,
                               Model& model) {
  const double start = clock();
  auto trained = at_iteration(0, "init", [&] {
    return learn(schedule.specs.front(), s, stage_config(configs.init, options.seed, "init", 0),
                 derive_seed(options.seed, "init_model"));
  });
  model = std::move(trained.model);
  IterationRecord rec;
  rec.t = 0;
  rec.slice_size = 0;
  rec.hypothesis = schedule.specs.front();
  rec.top1 = evaluate(model, eval_set).top1;
  rec.model_fingerprint = fingerprint(model);
  rec.wall_seconds = clock() - start;
  return rec;
}

}  // namespace

StreamResult stream_learning(const LabeledDataset& s, std::span<const UnlabeledSlice> slices,
                             const CapacitySchedule& schedule, const StreamConfigs& configs,
                             const LabeledDataset& eval_set, const StreamOptions& options) {
  check_inputs(s, slices, schedule, eval_set);
  const std::size_t iterations = schedule.iterations();
  if (slices.size() != iterations)
    throw ValidationError("slices", "got " + std::to_string(slices.size()) +
                                        " slices for a schedule with " +
                                        std::to_string(iterations) + " iterations");
  if (configs.pretrain.size() != iterations)
    throw ValidationError("pretrain configs", "need one per slice (" +
                                                  std::to_string(iterations) + "), got " +
                                                  std::to_string(configs.pretrain.size()));
  const auto clock = options.clock ? options.clock : std::function<double()>(steady_seconds);

  StreamResult result;
  result.report.manifest_fingerprint = options.manifest_fingerprint;
  result.report.seed = options.seed;
  Model& model = result.model;

  int first = 1;
  if (options.resume) {
    const auto& r = *options.resume;
    if (r.completed < 0 || static_cast<std::size_t>(r.completed) > iterations ||
        r.records.size() != static_cast<std::size_t>(r.completed) + 1)
      throw ValidationError("resume", "inconsistent resume point at t=" +
                                          std::to_string(r.completed));
    if (!(r.model.spec == schedule.specs[r.completed]))
      throw ValidationError("resume", "checkpoint spec " + r.model.spec.name() +
                                          " does not match schedule entry " +
                                          schedule.specs[r.completed].name());
    model = r.model;
    result.report.records = r.records;
    first = r.completed + 1;
  } else {
    result.report.records.push_back(
        init_iteration(s, schedule, configs, eval_set, options, clock, model));
    if (options.on_iteration) options.on_iteration({0, &model, nullptr, &result.report});
    if (options.stop_after && *options.stop_after <= 0) return result;
  }

  for (std::size_t t = static_cast<std::size_t>(first); t <= iterations; ++t) {
    const int ti = static_cast<int>(t);
    const double start = clock();
    const auto& slice = slices[t - 1];
    // Step 1: the previous iteration's F labels this slice, once.
    const PseudoLabeledDataset pseudo = pseudo_label(model, slice, options.threads);
    // Step 2: a fresh model of capacity H_t on the pseudo-labels only.
    auto pre = at_iteration(ti, "pretrain", [&] {
      return learn(schedule.specs[t], pseudo.features, pseudo.pseudo_labels,
                   stage_config(configs.pretrain[t - 1], options.seed, "pretrain", t),
                   derive_seed(options.seed, "pretrain_model", t));
    });
    // Step 3: fine-tune on the pristine S.
    auto fin = at_iteration(ti, "finetune", [&] {
      return finetune(std::move(pre.model), s,
                      stage_config(configs.finetune, options.seed, "finetune", t));
    });
    model = std::move(fin.model);

    IterationRecord rec;
    rec.t = ti;
    rec.slice_size = slice.size();
    rec.hypothesis = schedule.specs[t];
    rec.pretrain_loss = pre.trace.final_loss;
    rec.top1 = evaluate(model, eval_set).top1;
    rec.model_fingerprint = fingerprint(model);
    rec.labeler_fingerprint = pseudo.labeler_fingerprint;
    rec.wall_seconds = clock() - start;
    result.report.records.push_back(rec);

    if (options.on_iteration) options.on_iteration({ti, &model, &pseudo, &result.report});
    if (options.stop_after && *options.stop_after <= ti) break;
  }
  return result;
}

StreamResult no_streaming_run(const LabeledDataset& s, std::span<const UnlabeledSlice> slices,
                              const CapacitySchedule& schedule, const StreamConfigs& configs,
                              const LabeledDataset& eval_set, const StreamOptions& options) {
  check_inputs(s, slices, schedule, eval_set);
  if (slices.empty()) throw ValidationError("slices", "no-streaming run needs at least one slice");
  if (configs.pretrain.empty()) throw ValidationError("pretrain configs", "empty");
  const auto clock = options.clock ? options.clock : std::function<double()>(steady_seconds);

  StreamResult result;
  result.report.run_name = "no_stream";
  result.report.manifest_fingerprint = options.manifest_fingerprint;
  result.report.seed = options.seed;
  Model& model = result.model;
  result.report.records.push_back(
      init_iteration(s, schedule, configs, eval_set, options, clock, model));
  if (options.on_iteration) options.on_iteration({0, &model, nullptr, &result.report});

  const double start = clock();
  std::size_t total = 0;
  for (const auto& u : slices) total += u.size();
  UnlabeledSlice pool;
  pool.slice_index = 1;
  pool.source_id = "concatenated";
  pool.features.resize(static_cast<Eigen::Index>(total), s.features.cols());
  Eigen::Index offset = 0;
  for (const auto& u : slices) {
    pool.features.middleRows(offset, u.features.rows()) = u.features;
    offset += u.features.rows();
  }

  const HypothesisSpec& final_spec = schedule.specs.back();
  const PseudoLabeledDataset pseudo = pseudo_label(model, pool, options.threads);
  auto pre = at_iteration(1, "pretrain", [&] {
    return learn(final_spec, pseudo.features, pseudo.pseudo_labels,
                 stage_config(configs.pretrain.back(), options.seed, "no_stream_pretrain", 1),
                 derive_seed(options.seed, "no_stream_model", 1));
  });
  auto fin = at_iteration(1, "finetune", [&] {
    return finetune(std::move(pre.model), s,
                    stage_config(configs.finetune, options.seed, "no_stream_finetune", 1));
  });
  model = std::move(fin.model);

  IterationRecord rec;
  rec.t = 1;
  rec.slice_size = total;
  rec.hypothesis = final_spec;
  rec.pretrain_loss = pre.trace.final_loss;
  rec.top1 = evaluate(model, eval_set).top1;
  rec.model_fingerprint = fingerprint(model);
  rec.labeler_fingerprint = pseudo.labeler_fingerprint;
  rec.wall_seconds = clock() - start;
  result.report.records.push_back(rec);
  if (options.on_iteration) options.on_iteration({1, &model, &pseudo, &result.report});
  return result;
}

double joint_objective(const Model& model, const LabeledDataset& s,
                       const PseudoLabeledDataset& u) {
  double total = 0.0;
  if (s.size() > 0) total += summed_cross_entropy(forward(model, s.features), s.labels);
  if (u.size() > 0) total += summed_cross_entropy(forward(model, u.features), u.pseudo_labels);
  return total;
}

namespace {

// S and the pseudo-labeled slice stacked into one training set.
struct JointSet {
  Matrix x;
  Labels y;
};

JointSet stack(const LabeledDataset& s, const PseudoLabeledDataset& u) {
  JointSet j;
  j.x.resize(static_cast<Eigen::Index>(s.size() + u.size()), s.features.cols());
  j.x.topRows(static_cast<Eigen::Index>(s.size())) = s.features;
  j.x.bottomRows(static_cast<Eigen::Index>(u.size())) = u.features;
  j.y = s.labels;
  j.y.insert(j.y.end(), u.pseudo_labels.begin(), u.pseudo_labels.end());
  return j;
}

void axpy(Model& m, const Gradients& g, double step) {
  for (std::size_t i = 0; i < m.layers.size(); ++i) {
    m.layers[i].weight -= step * g.layers[i].weight;
    m.layers[i].bias -= step * g.layers[i].bias;
  }
}

double squared_norm(const Gradients& g) {
  double total = 0.0;
  for (const auto& l : g.layers) total += l.weight.squaredNorm() + l.bias.squaredNorm();
  return total;
}

// Full-batch gradient descent with Armijo backtracking on the mean joint
// loss. Every accepted step strictly lowers the objective, so the F-step
// can never raise it.
void descend(Model& model, const JointSet& data, const ExactCdOptions& opt) {
  const double n = static_cast<double>(data.y.size());
  double step = opt.initial_step;
  double current = summed_cross_entropy(forward(model, data.x), data.y);
  for (int it = 0; it < opt.max_inner_steps; ++it) {
    const Gradients g = gradients(model, data.x, data.y);
    const double gnorm2 = squared_norm(g);
    if (gnorm2 < opt.tolerance * opt.tolerance) break;
    bool accepted = false;
    for (int tries = 0; tries < 50; ++tries) {
      Model candidate = model;
      axpy(candidate, g, step);
      const double value = summed_cross_entropy(forward(candidate, data.x), data.y);
      // Armijo on the mean objective: f(w - a g) <= f(w) - 0.5 a |g|^2.
      if (std::isfinite(value) && value / n <= current / n - 0.5 * step * gnorm2) {
        model = std::move(candidate);
        current = value;
        accepted = true;
        step *= 2.0;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
}

}  // namespace

CoordinateDescentTrace exact_cd_run(const LabeledDataset& s, const UnlabeledSlice& u,
                                    const HypothesisSpec& spec, int iterations,
                                    const TrainConfig& cfg, std::uint64_t seed,
                                    const ExactCdOptions& options) {
  if (spec.kind != ModelKind::kLinear)
    throw ValidationError("spec", "exact coordinate descent requires a linear (convex) model");
  if (iterations < 1) throw ValidationError("iterations", "must be >= 1");
  s.validate();
  u.validate();

  CoordinateDescentTrace trace;
  trace.model = learn(spec, s, cfg, seed).model;
  Labels previous;
  for (int it = 1; it <= iterations; ++it) {
    const PseudoLabeledDataset pseudo = pseudo_label(trace.model, u);
    std::size_t changes = pseudo.size();
    if (!previous.empty()) {
      changes = 0;
      for (std::size_t i = 0; i < previous.size(); ++i)
        changes += previous[i] != pseudo.pseudo_labels[i];
    }
    trace.label_changes.push_back(changes);
    if (changes == 0 && trace.fixed_point_iteration < 0) trace.fixed_point_iteration = it;
    trace.objective.push_back(joint_objective(trace.model, s, pseudo));

    descend(trace.model, stack(s, pseudo), options);
    trace.objective.push_back(joint_objective(trace.model, s, pseudo));
    previous = pseudo.pseudo_labels;
  }
  return trace;
}

}  // namespace sst
