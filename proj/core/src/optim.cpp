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

#include "sst/optim.hpp"

#include <algorithm>
#include <cmath>

#include "sst/error.hpp"
#include "sst/rng.hpp"

namespace sst {

void TrainConfig::validate() const {
  if (!(initial_lr > 0.0)) throw ValidationError("initial_lr", "must be > 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ValidationError("momentum", "must be in [0, 1)");
  if (!(weight_decay >= 0.0)) throw ValidationError("weight_decay", "must be >= 0");
  if (!(decay_factor > 0.0)) throw ValidationError("decay_factor", "must be > 0");
  if (total_epochs < 0) throw ValidationError("total_epochs", "must be >= 0");
  if (batch_size < 1) throw ValidationError("batch_size", "must be >= 1");
  for (std::size_t i = 0; i < decay_epochs.size(); ++i) {
    if (decay_epochs[i] < 0 || decay_epochs[i] >= std::max(total_epochs, 1))
      throw ValidationError("decay_epochs", "entries must lie in [0, total_epochs)");
    if (i > 0 && decay_epochs[i] <= decay_epochs[i - 1])
      throw ValidationError("decay_epochs", "must be strictly increasing");
  }
}

double TrainConfig::lr_step_sum(std::size_t n) const {
  const std::size_t b = static_cast<std::size_t>(std::max(batch_size, 1));
  const double steps = static_cast<double>((n + b - 1) / b);
  double sum = 0.0;
  for (int e = 0; e < total_epochs; ++e) sum += lr_at(e) * steps;
  return sum;
}

void TrainConfig::match_decay_budget(double budget, std::size_t n) {
  const double s = lr_step_sum(n);
  if (!(budget >= 0.0) || !(s > 0.0))
    throw ValidationError("weight_decay", "decay budget needs budget >= 0 and at least one step");
  weight_decay = budget / s;
}

double TrainConfig::lr_at(int epoch) const {
  int decays = 0;
  for (int e : decay_epochs)
    if (e <= epoch) ++decays;
  return initial_lr / std::pow(decay_factor, decays);
}

TrainConfig TrainConfig::with_tail_decay(int epochs, int batch_size) {
  TrainConfig c;
  c.total_epochs = epochs;
  c.batch_size = batch_size;
  const int decay_at = (5 * epochs + 5) / 6;  // ceil(5/6 * epochs)
  if (epochs > 1 && decay_at < epochs) c.decay_epochs = {decay_at};
  return c;
}

double reference_decay_budget(std::size_t t) {
  static constexpr double kBudgets[] = {0.996, 1.816, 5.74};
  return kBudgets[std::min<std::size_t>(t, 2)];
}

namespace {

void check_labels(std::span<const std::int32_t> labels, Eigen::Index num_classes) {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] < 0 || labels[i] >= num_classes)
      throw ValidationError("labels", "row " + std::to_string(i) + " has label " +
                                          std::to_string(labels[i]) + " outside [0, " +
                                          std::to_string(num_classes) + ")");
}

double row_logsumexp(const Matrix& logits, Eigen::Index i) {
  const double mx = logits.row(i).maxCoeff();
  return mx + std::log((logits.row(i).array() - mx).exp().sum());
}

}  // namespace

CrossEntropy cross_entropy(const Matrix& logits, std::span<const std::int32_t> labels) {
  if (static_cast<std::size_t>(logits.rows()) != labels.size())
    throw ShapeError("labels length vs logits rows", logits.rows(),
                     static_cast<std::int64_t>(labels.size()));
  check_labels(labels, logits.cols());
  CrossEntropy out;
  const auto n = logits.rows();
  out.grad.resize(n, logits.cols());
  if (n == 0) return out;
  const double inv_n = 1.0 / static_cast<double>(n);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mx = logits.row(i).maxCoeff();
    auto e = (logits.row(i).array() - mx).exp();
    const double sum = e.sum();
    total += mx + std::log(sum) - logits(i, labels[i]);
    out.grad.row(i) = (e / sum).matrix() * inv_n;
    out.grad(i, labels[i]) -= inv_n;
  }
  out.loss = total * inv_n;
  return out;
}

double summed_cross_entropy(const Matrix& logits, std::span<const std::int32_t> labels) {
  if (static_cast<std::size_t>(logits.rows()) != labels.size())
    throw ShapeError("labels length vs logits rows", logits.rows(),
                     static_cast<std::int64_t>(labels.size()));
  check_labels(labels, logits.cols());
  double total = 0.0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i)
    total += row_logsumexp(logits, i) - logits(i, labels[i]);
  return total;
}

Gradients gradients(const Model& model, const Matrix& x, std::span<const std::int32_t> y) {
  if (x.cols() != model.spec.input_dim)
    throw ShapeError("input feature dim", model.spec.input_dim, x.cols());
  const std::size_t layers = model.layers.size();

  // activations[i] is the input to layer i; activations[layers] = logits.
  std::vector<Matrix> activations;
  activations.reserve(layers + 1);
  activations.push_back(x);
  for (std::size_t i = 0; i < layers; ++i) {
    Matrix z = activations.back() * model.layers[i].weight;
    z.rowwise() += model.layers[i].bias.transpose();
    if (i + 1 < layers) z = z.cwiseMax(0.0);
    activations.push_back(std::move(z));
  }

  auto ce = cross_entropy(activations.back(), y);
  Gradients g;
  g.loss = ce.loss;
  g.layers.resize(layers);
  Matrix delta = std::move(ce.grad);
  for (std::size_t i = layers; i-- > 0;) {
    const Matrix& input = activations[i];
    g.layers[i].weight = input.transpose() * delta;
    g.layers[i].bias = delta.colwise().sum().transpose();
    if (i > 0) {
      Matrix back = delta * model.layers[i].weight.transpose();
      // ReLU gate: the stored activation is zero exactly where the unit was off.
      delta = (input.array() > 0.0).select(back, 0.0);
    }
  }
  return g;
}

MomentumState MomentumState::zeros_like(const Model& model) {
  MomentumState s;
  for (const auto& l : model.layers)
    s.velocity.push_back({Matrix::Zero(l.weight.rows(), l.weight.cols()),
                          Vector::Zero(l.bias.size())});
  return s;
}

void sgd_step(Model& model, const Gradients& grads, MomentumState& state,
              const TrainConfig& config, double lr) {
  if (state.velocity.empty()) state = MomentumState::zeros_like(model);
  const double wd = config.weight_decay;
  const double mu = config.momentum;
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    auto& w = model.layers[i];
    auto& v = state.velocity[i];
    const auto& g = grads.layers[i];
    v.weight = mu * v.weight + (g.weight + wd * w.weight);
    w.weight -= lr * v.weight;
    v.bias = mu * v.bias + (g.bias + wd * w.bias);
    w.bias -= lr * v.bias;
  }
}

namespace {

double dataset_loss(const Model& model, const Matrix& x, std::span<const std::int32_t> y) {
  if (x.rows() == 0) return 0.0;
  return summed_cross_entropy(forward(model, x), y) / static_cast<double>(x.rows());
}

TrainResult train_loop(Model model, const Matrix& x, std::span<const std::int32_t> y,
                       const TrainConfig& config) {
  config.validate();
  if (x.cols() != model.spec.input_dim)
    throw ShapeError("input feature dim", model.spec.input_dim, x.cols());
  if (static_cast<std::size_t>(x.rows()) != y.size())
    throw ShapeError("labels length vs feature rows", x.rows(),
                     static_cast<std::int64_t>(y.size()));
  check_labels(y, model.spec.num_classes);

  TrainResult result;
  const auto n = static_cast<std::size_t>(x.rows());
  if (config.total_epochs == 0 || n == 0) {
    result.trace.final_loss = dataset_loss(model, x, y);
    result.model = std::move(model);
    return result;
  }

  MomentumState state = MomentumState::zeros_like(model);
  SplitMix64 rng(derive_seed(config.seed, "shuffle"));
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  const auto bs = static_cast<std::size_t>(config.batch_size);
  Matrix xb;
  Labels yb;
  for (int epoch = 0; epoch < config.total_epochs; ++epoch) {
    const double lr = config.lr_at(epoch);
    shuffle_indices(order, rng);
    double weighted = 0.0;
    for (std::size_t start = 0; start < n; start += bs) {
      const std::size_t m = std::min(bs, n - start);
      xb.resize(static_cast<Eigen::Index>(m), x.cols());
      yb.resize(m);
      for (std::size_t r = 0; r < m; ++r) {
        xb.row(r) = x.row(order[start + r]);
        yb[r] = y[order[start + r]];
      }
      const Gradients g = gradients(model, xb, yb);
      if (!std::isfinite(g.loss)) throw DivergenceError(epoch, lr);
      weighted += g.loss * static_cast<double>(m);
      sgd_step(model, g, state, config, lr);
    }
    const double epoch_loss = weighted / static_cast<double>(n);
    if (!std::isfinite(epoch_loss) || !model.layers.back().weight.allFinite())
      throw DivergenceError(epoch, lr);
    result.trace.epoch_loss.push_back(epoch_loss);
    result.trace.epoch_lr.push_back(lr);
  }
  result.trace.epochs_run = config.total_epochs;
  result.trace.final_loss = dataset_loss(model, x, y);
  if (!std::isfinite(result.trace.final_loss))
    throw DivergenceError(config.total_epochs - 1, config.lr_at(config.total_epochs - 1));
  result.model = std::move(model);
  return result;
}

}  // namespace

TrainResult learn(const HypothesisSpec& spec, const Matrix& x, std::span<const std::int32_t> y,
                  const TrainConfig& config, std::uint64_t seed) {
  if (x.rows() == 0) throw ValidationError("D", "training set is empty");
  return train_loop(init_model(spec, seed), x, y, config);
}

TrainResult learn(const HypothesisSpec& spec, const LabeledDataset& d, const TrainConfig& config,
                  std::uint64_t seed) {
  return learn(spec, d.features, d.labels, config, seed);
}

TrainResult finetune(Model model, const Matrix& x, std::span<const std::int32_t> y,
                     const TrainConfig& config) {
  return train_loop(std::move(model), x, y, config);
}

TrainResult finetune(Model model, const LabeledDataset& s, const TrainConfig& config) {
  return finetune(std::move(model), s.features, s.labels, config);
}

double grad_check(const Model& model, const Matrix& x, std::span<const std::int32_t> y,
                  double step) {
  return grad_check(model, x, y, step, gradients(model, x, y));
}

namespace {

using MatrixL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Loss evaluation for the finite-difference oracle, in extended precision.
// Perturbing W_l(i, j) or b_l(j) changes only column j of layer l's
// pre-activation, so each probe is a column update plus the rest of the
// forward pass from layer l + 1.
class PerturbedLoss {
 public:
  PerturbedLoss(const Model& model, const Matrix& x, std::span<const std::int32_t> y)
      : y_(y) {
    for (const auto& layer : model.layers) {
      weights_.push_back(layer.weight.cast<long double>());
      biases_.push_back(layer.bias.cast<long double>().transpose());
    }
    MatrixL a = x.cast<long double>();
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      inputs_.push_back(a);
      MatrixL z = (a * weights_[l]).rowwise() + biases_[l];
      pre_.push_back(z);
      a = is_last(l) ? z : z.cwiseMax(0.0L);
    }
  }

  // Loss with column j of layer l's pre-activation shifted by `shift`.
  long double operator()(std::size_t l, Eigen::Index j,
                         const Eigen::Matrix<long double, Eigen::Dynamic, 1>& shift) const {
    if (is_last(l)) {
      MatrixL logits = pre_[l];
      logits.col(j) += shift;
      return loss(logits);
    }
    const auto old_col = pre_[l].col(j);
    const Eigen::Matrix<long double, Eigen::Dynamic, 1> delta =
        (old_col + shift).cwiseMax(0.0L) - old_col.cwiseMax(0.0L);
    MatrixL z = pre_[l + 1] + delta * weights_[l + 1].row(j);
    for (std::size_t k = l + 2; k < weights_.size(); ++k)
      z = (z.cwiseMax(0.0L) * weights_[k]).rowwise() + biases_[k];
    return loss(z);
  }

  const MatrixL& input(std::size_t l) const { return inputs_[l]; }
  Eigen::Index rows() const { return inputs_.front().rows(); }

 private:
  bool is_last(std::size_t l) const { return l + 1 == weights_.size(); }

  long double loss(const MatrixL& logits) const {
    long double total = 0.0L;
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
      const long double m = logits.row(r).maxCoeff();
      const long double lse = m + std::log((logits.row(r).array() - m).exp().sum());
      total += lse - logits(r, y_[static_cast<std::size_t>(r)]);
    }
    return total / static_cast<long double>(logits.rows());
  }

  std::span<const std::int32_t> y_;
  std::vector<MatrixL> weights_;
  std::vector<Eigen::Matrix<long double, 1, Eigen::Dynamic>> biases_;
  std::vector<MatrixL> inputs_;
  std::vector<MatrixL> pre_;
};

}  // namespace

double grad_check(const Model& model, const Matrix& x, std::span<const std::int32_t> y,
                  double step, const Gradients& analytic) {
  model.validate();
  check_labels(y, model.spec.num_classes);
  if (static_cast<std::size_t>(x.rows()) != y.size())
    throw ShapeError("grad_check labels", x.rows(), static_cast<std::int64_t>(y.size()));
  const PerturbedLoss loss(model, x, y);
  const long double h = step;
  double worst = 0.0;
  auto record = [&](double grad, long double up, long double down) {
    const double numeric = static_cast<double>((up - down) / (2.0L * h));
    const double err =
        std::abs(grad - numeric) / std::max(1e-12, std::abs(grad) + std::abs(numeric));
    worst = std::max(worst, err);
  };
  const Eigen::Matrix<long double, Eigen::Dynamic, 1> ones =
      Eigen::Matrix<long double, Eigen::Dynamic, 1>::Ones(loss.rows());
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const Matrix& gw = analytic.layers[l].weight;
    const Vector& gb = analytic.layers[l].bias;
    for (Eigen::Index i = 0; i < gw.rows(); ++i) {
      const auto a = loss.input(l).col(i);
      for (Eigen::Index j = 0; j < gw.cols(); ++j)
        record(gw(i, j), loss(l, j, h * a), loss(l, j, -h * a));
    }
    for (Eigen::Index j = 0; j < gb.size(); ++j)
      record(gb(j), loss(l, j, h * ones), loss(l, j, -h * ones));
  }
  return worst;
}

}  // namespace sst
