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

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sst/dataset.hpp"
#include "sst/model.hpp"
#include "sst/types.hpp"

namespace sst {

struct TrainConfig {
  double initial_lr = 0.1;
  double decay_factor = 10.0;
  std::vector<int> decay_epochs;  // strictly increasing, each < total_epochs
  int total_epochs = 0;
  double momentum = 0.9;
  double weight_decay = 1e-4;
  int batch_size = 32;
  std::uint64_t seed = 0;  // mini-batch shuffling

  void validate() const;
  // initial_lr / decay_factor^(number of decay epochs <= epoch)
  double lr_at(int epoch) const;

  // Step decay at ceil(5/6 * epochs), e.g. 30 epochs -> decay at 25.
  static TrainConfig with_tail_decay(int epochs, int batch_size = 32);

  // Sum of lr over every SGD step taken on n rows (partial batches count).
  double lr_step_sum(std::size_t n) const;
  // Sets weight_decay so that lr_step_sum(n) * weight_decay == budget.
  void match_decay_budget(double budget, std::size_t n);
};

// sum(lr * wd) over all steps of pretraining stage t in the large-scale
// recipe: 0.996, 1.816, 5.74, then the last value repeated.
double reference_decay_budget(std::size_t t);

struct TrainTrace {
  std::vector<double> epoch_loss;  // mean training loss of each epoch
  std::vector<double> epoch_lr;    // learning rate used in each epoch
  double final_loss = 0.0;         // loss of the returned model on its training set
  int epochs_run = 0;
};

struct CrossEntropy {
  double loss = 0.0;  // mean over rows
  Matrix grad;        // d loss / d logits = (softmax - one_hot) / N
};

// Mean -log softmax(logits)[label] via log-sum-exp. Throws
// ValidationError naming the row for an out-of-range label.
CrossEntropy cross_entropy(const Matrix& logits, std::span<const std::int32_t> labels);

// Summed (not averaged) cross-entropy without the gradient.
double summed_cross_entropy(const Matrix& logits, std::span<const std::int32_t> labels);

// Per-layer gradients, same shapes as Model::layers.
struct Gradients {
  std::vector<Layer> layers;
  double loss = 0.0;
};

// Exact backpropagation of the mean cross-entropy.
Gradients gradients(const Model& model, const Matrix& x, std::span<const std::int32_t> y);

struct MomentumState {
  std::vector<Layer> velocity;
  static MomentumState zeros_like(const Model& model);
};

// Coupled L2, heavy-ball momentum, per parameter tensor:
//   g = grad + weight_decay * w;  v = momentum * v + g;  w = w - lr * v
void sgd_step(Model& model, const Gradients& grads, MomentumState& state,
              const TrainConfig& config, double lr);

struct TrainResult {
  Model model;
  TrainTrace trace;
};

// Learn: fresh He-initialized model (init seed = `seed`), then the SGD loop.
TrainResult learn(const HypothesisSpec& spec, const Matrix& x, std::span<const std::int32_t> y,
                  const TrainConfig& config, std::uint64_t seed);
TrainResult learn(const HypothesisSpec& spec, const LabeledDataset& d, const TrainConfig& config,
                  std::uint64_t seed);

// The same SGD loop, starting from `model` as given.
TrainResult finetune(Model model, const Matrix& x, std::span<const std::int32_t> y,
                     const TrainConfig& config);
TrainResult finetune(Model model, const LabeledDataset& s, const TrainConfig& config);

// Max over parameters of |analytic - numeric| / max(1e-12, |analytic| + |numeric|)
// with central differences of the given step. The perturbed losses are
// evaluated in long double so that round-off in the loss difference stays
// well below the step for gradient entries near zero.
double grad_check(const Model& model, const Matrix& x, std::span<const std::int32_t> y,
                  double step);
// Same, against a caller-supplied analytic gradient (for fault injection).
double grad_check(const Model& model, const Matrix& x, std::span<const std::int32_t> y,
                  double step, const Gradients& analytic);

}  // namespace sst
