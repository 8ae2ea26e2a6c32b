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

#include <doctest.h>

#include "oracles.hpp"
#include "sst/dataset.hpp"
#include "sst/error.hpp"
#include "sst/eval.hpp"
#include "sst/model.hpp"
#include "sst/optim.hpp"

using namespace sst;

namespace {

LabeledDataset two_gaussians(double separation, std::size_t n, std::uint64_t seed) {
  SynthSpec spec;
  spec.num_classes = 2;
  spec.dim = 2;
  spec.num_samples = n;
  spec.separation = separation;
  spec.seed = seed;
  return synthesize(spec);
}

LabeledDataset xor_data(std::size_t n, std::uint64_t seed) {
  SynthSpec spec;
  spec.kind = SynthKind::kXor;
  spec.num_classes = 2;
  spec.dim = 2;
  spec.num_samples = n;
  spec.separation = 6;
  spec.seed = seed;
  return synthesize(spec);
}

double train_top1(const Model& m, const LabeledDataset& d) { return evaluate(m, d).top1; }

}  // namespace

TEST_CASE("cross_entropy closed forms") {
  const Matrix zeros = Matrix::Zero(3, 2);
  CHECK(cross_entropy(zeros, Labels{0, 1, 1}).loss == doctest::Approx(0.6931471805599453));
  CHECK(cross_entropy(Matrix::Zero(4, 7), Labels{0, 3, 6, 2}).loss ==
        doctest::Approx(std::log(7.0)).epsilon(1e-14));
  const CrossEntropy big = cross_entropy(Matrix{{1000.0, 0.0}}, Labels{0});
  CHECK(std::isfinite(big.loss));
  CHECK(big.loss == doctest::Approx(0.0));
  CHECK(cross_entropy(Matrix{{1000.0, 0.0}}, Labels{1}).loss == doctest::Approx(1000.0));
  CHECK(summed_cross_entropy(zeros, Labels{0, 1, 1}) == doctest::Approx(3 * std::log(2.0)));
}

TEST_CASE("cross_entropy rejects bad labels naming the row") {
  try {
    cross_entropy(Matrix::Zero(3, 2), Labels{0, 2, 1});
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("1") != std::string::npos);
  }
  CHECK_THROWS_AS(cross_entropy(Matrix::Zero(3, 2), Labels{0, -1, 1}), ValidationError);
}

TEST_CASE("cross_entropy gradient matches finite differences") {
  Matrix logits = oracle::random_matrix(8, 5, 11, 2.0);
  const Labels y = oracle::random_labels(8, 5, 12);
  const Matrix g = cross_entropy(logits, y).grad;
  const double h = 1e-6;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i)
    for (Eigen::Index j = 0; j < logits.cols(); ++j) {
      auto loss_at = [&](double v) {
        Matrix l = logits;
        l(i, j) = v;
        long double s = 0;
        for (Eigen::Index r = 0; r < l.rows(); ++r) {
          std::vector<double> row(l.row(r).data(), l.row(r).data() + l.cols());
          s += oracle::row_ce(row, y[r]);
        }
        return static_cast<double>(s / l.rows());
      };
      const double num = (loss_at(logits(i, j) + h) - loss_at(logits(i, j) - h)) / (2 * h);
      worst = std::max(worst, std::abs(num - g(i, j)) / std::max(1e-12, std::abs(num) + std::abs(g(i, j))));
    }
  CHECK(worst <= 1e-6);
}

TEST_CASE("linear gradient equals X^T (softmax - onehot) / N") {
  const Model m = init_model(parse_hypothesis("linear", 6, 4), 2);
  const Matrix x = oracle::random_matrix(25, 6, 3);
  const Labels y = oracle::random_labels(25, 4, 4);
  const Gradients g = gradients(m, x, y);

  // Reference, by loops.
  std::vector<std::vector<double>> dz(25, std::vector<double>(4));
  for (int i = 0; i < 25; ++i) {
    std::vector<double> z = oracle::forward_row(m, {x.row(i).data(), x.row(i).data() + 6});
    double mx = *std::max_element(z.begin(), z.end()), s = 0;
    for (double& v : z) s += (v = std::exp(v - mx));
    for (int c = 0; c < 4; ++c) dz[i][c] = (z[c] / s - (y[i] == c ? 1.0 : 0.0)) / 25.0;
  }
  for (int a = 0; a < 6; ++a)
    for (int c = 0; c < 4; ++c) {
      double ref = 0;
      for (int i = 0; i < 25; ++i) ref += x(i, a) * dz[i][c];
      CHECK(std::abs(g.layers[0].weight(a, c) - ref) <= 1e-12);
    }
  for (int c = 0; c < 4; ++c) {
    double ref = 0;
    for (int i = 0; i < 25; ++i) ref += dz[i][c];
    CHECK(std::abs(g.layers[0].bias(c) - ref) <= 1e-12);
  }
}

TEST_CASE("an inactive hidden unit gets exactly zero incoming gradient") {
  Model m = init_model(parse_hypothesis("mlp:5", 3, 2), 7);
  m.layers[0].weight.col(2).setZero();
  m.layers[0].bias(2) = -1.0;  // unit 2 is dead on every row
  const Matrix x = oracle::random_matrix(10, 3, 8);
  const Labels y = oracle::random_labels(10, 2, 9);
  const Gradients g = gradients(m, x, y);
  for (int i = 0; i < 3; ++i) CHECK(g.layers[0].weight(i, 2) == 0.0);
  CHECK(g.layers[0].bias(2) == 0.0);
  CHECK(g.layers[1].weight.row(2).isZero());
  // grad_check treats the exact zeros as zero error.
  CHECK(grad_check(m, x, y, 1e-6) <= 1e-5);
}

TEST_CASE("MLP(4,3) backprop matches the loop-based finite-difference oracle") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Model m = init_model(parse_hypothesis("mlp:4x3", 5, 3), seed);
    // Zero biases put rows with all-dead units exactly on a ReLU kink.
    for (std::size_t l = 0; l < m.layers.size(); ++l)
      m.layers[l].bias = oracle::random_matrix(1, m.layers[l].bias.size(), 300 + seed + l, 0.1).row(0);
    const Matrix x = oracle::random_matrix(6, 5, 100 + seed);
    const Labels y = oracle::random_labels(6, 3, 200 + seed);
    const auto analytic = oracle::flatten(gradients(m, x, y).layers);
    const auto numeric = oracle::numeric_gradient(m, oracle::to_rows(x), y, 1e-6);
    CHECK(oracle::max_rel_error(analytic, numeric) <= 1e-5);
  }
}

TEST_CASE("gradients report the mean loss") {
  const Model m = init_model(parse_hypothesis("mlp:6", 4, 3), 1);
  const Matrix x = oracle::random_matrix(9, 4, 2);
  const Labels y = oracle::random_labels(9, 3, 3);
  CHECK(gradients(m, x, y).loss ==
        doctest::Approx(oracle::mean_loss(m, oracle::to_rows(x), y)).epsilon(1e-12));
}

TEST_CASE("sgd_step update rule") {
  const Model start = init_model(parse_hypothesis("linear", 2, 2), 1);
  Gradients g;
  g.layers = start.layers;
  for (auto& l : g.layers) {
    l.weight.setConstant(0.5);
    l.bias.setConstant(-0.25);
  }

  SUBCASE("plain step") {
    TrainConfig c;
    c.momentum = 0;
    c.weight_decay = 0;
    Model m = start;
    auto st = MomentumState::zeros_like(m);
    sgd_step(m, g, st, c, 0.1);
    CHECK((m.layers[0].weight - (start.layers[0].weight.array() - 0.05).matrix()).norm() < 1e-15);
    CHECK((m.layers[0].bias - (start.layers[0].bias.array() + 0.025).matrix()).norm() < 1e-15);
  }
  SUBCASE("decay only") {
    TrainConfig c;
    c.momentum = 0;
    c.weight_decay = 0.01;
    Gradients zero = g;
    for (auto& l : zero.layers) {
      l.weight.setZero();
      l.bias.setZero();
    }
    Model m = start;
    auto st = MomentumState::zeros_like(m);
    sgd_step(m, zero, st, c, 0.1);
    CHECK((m.layers[0].weight - start.layers[0].weight * (1 - 0.1 * 0.01)).norm() < 1e-15);
  }
  SUBCASE("two momentum steps move lr * g * (1 + 1.9)") {
    TrainConfig c;
    c.momentum = 0.9;
    c.weight_decay = 0;
    Model m = start;
    auto st = MomentumState::zeros_like(m);
    sgd_step(m, g, st, c, 0.1);
    sgd_step(m, g, st, c, 0.1);
    const Matrix moved = start.layers[0].weight - m.layers[0].weight;
    for (Eigen::Index k = 0; k < moved.size(); ++k)
      CHECK(moved.data()[k] == doctest::Approx(0.1 * 0.5 * 2.9).epsilon(1e-12));
  }
}

TEST_CASE("step decay schedule") {
  const TrainConfig c = TrainConfig::with_tail_decay(30, 64);
  CHECK(c.decay_epochs == std::vector<int>{25});
  CHECK(c.lr_at(24) == doctest::Approx(0.1));
  CHECK(c.lr_at(25) == doctest::Approx(0.01));
  TrainConfig two;
  two.total_epochs = 10;
  two.decay_epochs = {3, 6};
  CHECK(two.lr_at(7) == doctest::Approx(0.001));
  CHECK(TrainConfig::with_tail_decay(1).decay_epochs.empty());

  TrainConfig bad = two;
  bad.decay_epochs = {6, 3};
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = two;
  bad.decay_epochs = {10};
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = two;
  bad.momentum = 1.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = two;
  bad.initial_lr = 0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("decay budget matching") {
  TrainConfig c = TrainConfig::with_tail_decay(12, 10);
  // 95 rows, batch 10 -> 10 steps per epoch; 10 epochs at 0.1, 2 at 0.01.
  CHECK(c.lr_step_sum(95) == doctest::Approx(10 * 0.1 * 10 + 2 * 0.01 * 10));
  c.match_decay_budget(0.5, 95);
  CHECK(c.weight_decay * c.lr_step_sum(95) == doctest::Approx(0.5));
  CHECK(reference_decay_budget(0) == 0.996);
  CHECK(reference_decay_budget(7) == 5.74);
}

TEST_CASE("learn separates well-separated gaussians") {
  const LabeledDataset d = two_gaussians(10, 200, 1);
  const TrainResult r = learn(parse_hypothesis("linear", 2, 2), d, TrainConfig::with_tail_decay(20), 3);
  CHECK(train_top1(r.model, d) == 1.0);
  CHECK(r.trace.epochs_run == 20);
  CHECK(r.trace.epoch_loss.size() == 20);
  CHECK(r.trace.epoch_lr.back() == doctest::Approx(0.01));
  for (double l : r.trace.epoch_loss) CHECK(std::isfinite(l));
}

TEST_CASE("xor defeats a linear model but not an MLP") {
  const LabeledDataset d = xor_data(400, 2);
  const auto lin = learn(parse_hypothesis("linear", 2, 2), d, TrainConfig::with_tail_decay(60), 1);
  CHECK(train_top1(lin.model, d) <= 0.75);
  const auto mlp = learn(parse_hypothesis("mlp:8", 2, 2), d, TrainConfig::with_tail_decay(60), 1);
  CHECK(train_top1(mlp.model, d) >= 0.95);
}

TEST_CASE("learn is deterministic and zero epochs is the init model") {
  const LabeledDataset d = two_gaussians(2, 100, 5);
  TrainConfig c = TrainConfig::with_tail_decay(5, 16);
  c.seed = 77;
  const HypothesisSpec spec = parse_hypothesis("mlp:6", 2, 2);
  CHECK(learn(spec, d, c, 4).model.same_parameters(learn(spec, d, c, 4).model));
  TrainConfig other = c;
  other.seed = 78;
  CHECK_FALSE(learn(spec, d, c, 4).model.same_parameters(learn(spec, d, other, 4).model));

  TrainConfig none;
  const TrainResult r = learn(spec, d, none, 4);
  CHECK(r.model.same_parameters(init_model(spec, 4)));
  CHECK(r.trace.epochs_run == 0);
  CHECK(r.trace.epoch_loss.empty());
}

TEST_CASE("learn reports divergence with epoch and lr") {
  const LabeledDataset d = two_gaussians(50, 40, 1);
  TrainConfig c = TrainConfig::with_tail_decay(3, 8);
  c.initial_lr = 1e300;
  try {
    learn(parse_hypothesis("linear", 2, 2), d, c, 1);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.epoch() >= 0);
    CHECK(e.lr() == 1e300);
  }
}

TEST_CASE("finetune") {
  const LabeledDataset d = two_gaussians(8, 60, 9);
  const HypothesisSpec spec = parse_hypothesis("mlp:6", 2, 2);
  const Model base = learn(spec, d, TrainConfig::with_tail_decay(20, 8), 1).model;

  SUBCASE("zero epochs leaves parameters alone") {
    CHECK(finetune(base, d, TrainConfig{}).model.same_parameters(base));
  }
  SUBCASE("tiny lr at 100% accuracy never increases the loss") {
    REQUIRE(train_top1(base, d) == 1.0);
    TrainConfig c = TrainConfig::with_tail_decay(1, static_cast<int>(d.size()));
    c.initial_lr = 1e-4;
    Model m = base;
    double prev = cross_entropy(forward(m, d.features), d.labels).loss;
    for (int e = 0; e < 20; ++e) {
      m = finetune(m, d, c).model;
      const double now = cross_entropy(forward(m, d.features), d.labels).loss;
      CHECK(now <= prev + 1e-6);
      prev = now;
    }
  }
  SUBCASE("recovers S accuracy after pretraining on wrong labels") {
    LabeledDataset wrong = two_gaussians(8, 400, 10);
    for (auto& y : wrong.labels) y = 1 - y;
    const Model pre = learn(spec, wrong, TrainConfig::with_tail_decay(10, 32), 2).model;
    CHECK(train_top1(pre, d) < 0.5);
    const TrainConfig c = TrainConfig::with_tail_decay(60, 8);
    const double tuned = train_top1(finetune(pre, d, c).model, d);
    const double scratch = train_top1(learn(spec, d, c, 3).model, d);
    CHECK(tuned >= scratch);
  }
  SUBCASE("input dimension must match") {
    const LabeledDataset wide = synthesize(SynthSpec{SynthKind::kGaussianMixture, 2, 3, 20, 1.0, 0});
    CHECK_THROWS_AS(finetune(base, wide, TrainConfig::with_tail_decay(1)), ShapeError);
  }
}

TEST_CASE("grad_check") {
  const LabeledDataset d = two_gaussians(1, 12, 3);
  for (const char* name : {"linear", "mlp:8", "mlp:4x3"}) {
    const Model m = init_model(parse_hypothesis(name, 2, 2), 5);
    CHECK(grad_check(m, d.features, d.labels, 1e-6) <= 1e-5);
  }

  const Model m = init_model(parse_hypothesis("mlp:4x3", 2, 2), 5);
  Gradients g = gradients(m, d.features, d.labels);
  // Double the largest entry so the fault cannot hide in a near-zero gradient.
  Eigen::Index r, c;
  g.layers[0].weight.cwiseAbs().maxCoeff(&r, &c);
  g.layers[0].weight(r, c) *= 2.0;
  CHECK(grad_check(m, d.features, d.labels, 1e-6, g) >= 0.3);
}
