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
#include <string>
#include <string_view>
#include <vector>

#include "sst/types.hpp"

namespace sst {

enum class ModelKind { kLinear, kMlp };

// Architecture descriptor for one hypothesis class.
struct HypothesisSpec {
  ModelKind kind = ModelKind::kLinear;
  int input_dim = 0;
  int num_classes = 0;
  std::vector<int> hidden_sizes;  // empty for linear
  int capacity_index = 0;

  void validate() const;
  // "linear", "mlp32", "mlp256x128".
  std::string name() const;

  friend bool operator==(const HypothesisSpec&, const HypothesisSpec&) = default;
};

// Accepts "linear", "mlp32", "mlp:32", "mlp256x128", "mlp:256x128".
HypothesisSpec parse_hypothesis(std::string_view text, int input_dim, int num_classes,
                                int capacity_index = 0);

// Sum over layers of fan_in * fan_out + fan_out.
std::size_t parameter_count(const HypothesisSpec& spec);

// weight is fan_in x fan_out, so a layer computes X * W + b.
struct Layer {
  Matrix weight;
  Vector bias;
};

struct Model {
  HypothesisSpec spec;
  std::vector<Layer> layers;
  std::uint64_t init_seed = 0;

  std::size_t parameter_count() const;
  // Throws if layer shapes do not chain from input_dim to num_classes or
  // a parameter is non-finite.
  void validate() const;
  bool same_parameters(const Model& other) const;
};

// He (fan_in) normal weights, zero biases.
Model init_model(const HypothesisSpec& spec, std::uint64_t seed);

// Logits, N x C. ReLU between layers, identity at the output.
Matrix forward(const Model& model, const Matrix& x);

// Per-row argmax; ties go to the smallest class index.
Labels predict(const Model& model, const Matrix& x);
Labels argmax_rows(const Matrix& logits);

// Row-wise softmax with max subtraction.
Matrix softmax_rows(const Matrix& logits);

// FNV-1a over the spec and the bit patterns of every parameter.
std::uint64_t fingerprint(const Model& model);

// specs[0] is the init hypothesis (t = 0); specs[t] is used on slice t.
struct CapacitySchedule {
  std::vector<HypothesisSpec> specs;

  std::size_t iterations() const noexcept { return specs.empty() ? 0 : specs.size() - 1; }
  // Rejects an empty schedule, mismatched dims, or a parameter count that
  // decreases between consecutive entries.
  void validate() const;
};

// linear -> mlp32 -> mlp128 -> mlp256x128
CapacitySchedule default_schedule(int input_dim, int num_classes);
// The same spec repeated for every iteration.
CapacitySchedule fixed_schedule(const HypothesisSpec& spec, std::size_t iterations);
CapacitySchedule schedule_from_names(const std::vector<std::string>& names, int input_dim,
                                     int num_classes);

}  // namespace sst
