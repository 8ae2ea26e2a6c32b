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

#include "sst/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "sst/error.hpp"
#include "sst/ini.hpp"
#include "sst/rng.hpp"

namespace sst {

void HypothesisSpec::validate() const {
  if (input_dim < 1) throw ValidationError("input_dim", "must be >= 1");
  if (num_classes < 2) throw ValidationError("num_classes", "must be >= 2");
  if (capacity_index < 0) throw ValidationError("capacity_index", "must be >= 0");
  if (kind == ModelKind::kLinear && !hidden_sizes.empty())
    throw ValidationError("hidden_sizes", "linear spec must not have hidden layers");
  if (kind == ModelKind::kMlp && hidden_sizes.empty())
    throw ValidationError("hidden_sizes", "mlp spec needs at least one hidden layer");
  for (int h : hidden_sizes)
    if (h < 1) throw ValidationError("hidden_sizes", "widths must be positive");
}

std::string HypothesisSpec::name() const {
  if (kind == ModelKind::kLinear) return "linear";
  std::string s = "mlp";
  for (std::size_t i = 0; i < hidden_sizes.size(); ++i) {
    if (i) s += 'x';
    s += std::to_string(hidden_sizes[i]);
  }
  return s;
}

HypothesisSpec parse_hypothesis(std::string_view text, int input_dim, int num_classes,
                                int capacity_index) {
  HypothesisSpec spec;
  spec.input_dim = input_dim;
  spec.num_classes = num_classes;
  spec.capacity_index = capacity_index;
  const std::string t = trim(text);
  if (t == "linear") {
    spec.kind = ModelKind::kLinear;
  } else if (t.rfind("mlp", 0) == 0) {
    spec.kind = ModelKind::kMlp;
    std::string_view rest = std::string_view(t).substr(3);
    if (!rest.empty() && rest.front() == ':') rest.remove_prefix(1);
    for (const auto& w : split_list(rest, 'x')) {
      int v = 0;
      try {
        std::size_t used = 0;
        v = std::stoi(w, &used);
        if (used != w.size()) throw std::invalid_argument("junk");
      } catch (const std::exception&) {
        throw ValidationError("hypothesis", "bad hidden width in '" + t + "'");
      }
      spec.hidden_sizes.push_back(v);
    }
  } else {
    throw ValidationError("hypothesis", "unknown hypothesis '" + t + "'");
  }
  spec.validate();
  return spec;
}

namespace {

std::vector<int> layer_widths(const HypothesisSpec& spec) {
  std::vector<int> widths{spec.input_dim};
  widths.insert(widths.end(), spec.hidden_sizes.begin(), spec.hidden_sizes.end());
  widths.push_back(spec.num_classes);
  return widths;
}

bool bits_equal(const double* a, const double* b, Eigen::Index n) {
  for (Eigen::Index i = 0; i < n; ++i)
    if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i])) return false;
  return true;
}

}  // namespace

std::size_t parameter_count(const HypothesisSpec& spec) {
  const auto w = layer_widths(spec);
  std::size_t total = 0;
  for (std::size_t i = 0; i + 1 < w.size(); ++i)
    total += static_cast<std::size_t>(w[i]) * w[i + 1] + w[i + 1];
  return total;
}

std::size_t Model::parameter_count() const {
  std::size_t total = 0;
  for (const auto& l : layers) total += l.weight.size() + l.bias.size();
  return total;
}

void Model::validate() const {
  spec.validate();
  const auto w = layer_widths(spec);
  if (layers.size() + 1 != w.size())
    throw ShapeError("layer count", static_cast<std::int64_t>(w.size() - 1),
                     static_cast<std::int64_t>(layers.size()));
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].weight.rows() != w[i])
      throw ShapeError("layer " + std::to_string(i) + " fan_in", w[i], layers[i].weight.rows());
    if (layers[i].weight.cols() != w[i + 1])
      throw ShapeError("layer " + std::to_string(i) + " fan_out", w[i + 1],
                       layers[i].weight.cols());
    if (layers[i].bias.size() != w[i + 1])
      throw ShapeError("layer " + std::to_string(i) + " bias", w[i + 1], layers[i].bias.size());
    if (!layers[i].weight.allFinite() || !layers[i].bias.allFinite())
      throw ValidationError("layers", "layer " + std::to_string(i) + " has non-finite values");
  }
}

bool Model::same_parameters(const Model& other) const {
  if (!(spec == other.spec) || layers.size() != other.layers.size()) return false;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& a = layers[i];
    const auto& b = other.layers[i];
    if (a.weight.rows() != b.weight.rows() || a.weight.cols() != b.weight.cols() ||
        a.bias.size() != b.bias.size())
      return false;
    if (!bits_equal(a.weight.data(), b.weight.data(), a.weight.size()) ||
        !bits_equal(a.bias.data(), b.bias.data(), a.bias.size()))
      return false;
  }
  return true;
}

Model init_model(const HypothesisSpec& spec, std::uint64_t seed) {
  spec.validate();
  Model m;
  m.spec = spec;
  m.init_seed = seed;
  SplitMix64 rng(derive_seed(seed, "he_init"));
  const auto w = layer_widths(spec);
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    const double stddev = std::sqrt(2.0 / w[i]);
    Layer layer;
    layer.weight.resize(w[i], w[i + 1]);
    for (Eigen::Index k = 0; k < layer.weight.size(); ++k)
      layer.weight.data()[k] = stddev * rng.normal();
    layer.bias = Vector::Zero(w[i + 1]);
    m.layers.push_back(std::move(layer));
  }
  return m;
}

Matrix forward(const Model& model, const Matrix& x) {
  if (x.cols() != model.spec.input_dim)
    throw ShapeError("input feature dim", model.spec.input_dim, x.cols());
  Matrix h = x;
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    const auto& layer = model.layers[i];
    Matrix z = h * layer.weight;
    z.rowwise() += layer.bias.transpose();
    if (i + 1 < model.layers.size()) z = z.cwiseMax(0.0);
    h = std::move(z);
  }
  return h;
}

Labels argmax_rows(const Matrix& logits) {
  Labels out(static_cast<std::size_t>(logits.rows()));
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < logits.cols(); ++c)
      if (logits(i, c) > logits(i, best)) best = c;
    out[i] = static_cast<std::int32_t>(best);
  }
  return out;
}

Labels predict(const Model& model, const Matrix& x) { return argmax_rows(forward(model, x)); }

Matrix softmax_rows(const Matrix& logits) {
  Matrix p = logits;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    const double mx = p.row(i).maxCoeff();
    p.row(i) = (p.row(i).array() - mx).exp();
    p.row(i) /= p.row(i).sum();
  }
  return p;
}

std::uint64_t fingerprint(const Model& model) {
  Fnv1a h;
  h.update(model.spec.name());
  h.update_u64(static_cast<std::uint64_t>(model.spec.input_dim));
  h.update_u64(static_cast<std::uint64_t>(model.spec.num_classes));
  for (const auto& l : model.layers) {
    for (Eigen::Index k = 0; k < l.weight.size(); ++k) h.update_f64(l.weight.data()[k]);
    for (Eigen::Index k = 0; k < l.bias.size(); ++k) h.update_f64(l.bias.data()[k]);
  }
  return h.digest();
}

void CapacitySchedule::validate() const {
  if (specs.empty()) throw ValidationError("schedule", "needs at least the init spec");
  for (std::size_t t = 0; t < specs.size(); ++t) {
    specs[t].validate();
    if (specs[t].input_dim != specs[0].input_dim || specs[t].num_classes != specs[0].num_classes)
      throw ValidationError("schedule[" + std::to_string(t) + "]",
                            "input_dim/num_classes differ from the init spec");
    if (t > 0 && parameter_count(specs[t]) < parameter_count(specs[t - 1]))
      throw ValidationError("schedule[" + std::to_string(t) + "]",
                            "parameter count decreases (" +
                                std::to_string(parameter_count(specs[t - 1])) + " -> " +
                                std::to_string(parameter_count(specs[t])) + ")");
  }
}

CapacitySchedule schedule_from_names(const std::vector<std::string>& names, int input_dim,
                                     int num_classes) {
  CapacitySchedule s;
  for (std::size_t t = 0; t < names.size(); ++t)
    s.specs.push_back(parse_hypothesis(names[t], input_dim, num_classes, static_cast<int>(t)));
  s.validate();
  return s;
}

CapacitySchedule default_schedule(int input_dim, int num_classes) {
  return schedule_from_names({"linear", "mlp32", "mlp128", "mlp256x128"}, input_dim, num_classes);
}

CapacitySchedule fixed_schedule(const HypothesisSpec& spec, std::size_t iterations) {
  CapacitySchedule s;
  for (std::size_t t = 0; t <= iterations; ++t) {
    s.specs.push_back(spec);
    s.specs.back().capacity_index = 0;
  }
  s.validate();
  return s;
}

}  // namespace sst
