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
#include "sst/error.hpp"
#include "sst/model.hpp"
#include "sst/optim.hpp"

using namespace sst;

TEST_CASE("parameter counts follow the shapes") {
  CHECK(parameter_count(parse_hypothesis("linear", 2, 2)) == 6);
  CHECK(parameter_count(parse_hypothesis("mlp:4", 2, 2)) == 2 * 4 + 4 + 4 * 2 + 2);
  CHECK(parameter_count(parse_hypothesis("mlp256x128", 20, 20)) ==
        20 * 256 + 256 + 256 * 128 + 128 + 128 * 20 + 20);

  const Model m = init_model(parse_hypothesis("linear", 2, 2), 1);
  REQUIRE(m.layers.size() == 1);
  CHECK(m.layers[0].weight.rows() == 2);
  CHECK(m.layers[0].weight.cols() == 2);
  CHECK(m.layers[0].bias.size() == 2);
  CHECK(m.parameter_count() == 6);
}

TEST_CASE("hypothesis names parse and print") {
  CHECK(parse_hypothesis("mlp:32", 3, 2).name() == "mlp32");
  CHECK(parse_hypothesis("mlp:256x128", 3, 2).hidden_sizes == std::vector<int>{256, 128});
  CHECK(parse_hypothesis("linear", 3, 2).kind == ModelKind::kLinear);
  CHECK_THROWS_AS(parse_hypothesis("mlp:0", 3, 2), ValidationError);
  CHECK_THROWS_AS(parse_hypothesis("resnet", 3, 2), ValidationError);
  CHECK_THROWS_AS(parse_hypothesis("mlp:x", 3, 2), ValidationError);
}

TEST_CASE("He initialization has std sqrt(2 / fan_in) and zero biases") {
  // 10 x 32 = 320 entries per draw; pool draws over seeds for >= 10,000.
  const HypothesisSpec spec = parse_hypothesis("mlp:32", 10, 5);
  double s = 0, s2 = 0;
  std::size_t n = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Model m = init_model(spec, seed);
    CHECK(m.layers[0].weight.rows() == 10);
    CHECK(m.layers[1].weight.rows() == 32);
    CHECK(m.layers[0].bias.isZero());
    for (Eigen::Index k = 0; k < m.layers[0].weight.size(); ++k) {
      const double w = m.layers[0].weight.data()[k];
      s += w;
      s2 += w * w;
      ++n;
    }
  }
  REQUIRE(n >= 10000);
  const double mean = s / n;
  const double sd = std::sqrt(s2 / n - mean * mean);
  CHECK(std::abs(sd - std::sqrt(0.2)) / std::sqrt(0.2) < 0.10);
  CHECK(std::abs(mean) < 0.02);
}

TEST_CASE("initialization is deterministic per seed") {
  const HypothesisSpec spec = parse_hypothesis("mlp:16x8", 4, 3);
  CHECK(init_model(spec, 5).same_parameters(init_model(spec, 5)));
  CHECK_FALSE(init_model(spec, 5).same_parameters(init_model(spec, 6)));
  CHECK(fingerprint(init_model(spec, 5)) == fingerprint(init_model(spec, 5)));
  CHECK(fingerprint(init_model(spec, 5)) != fingerprint(init_model(spec, 6)));
}

TEST_CASE("zero weights give uniform softmax") {
  Model m = init_model(parse_hypothesis("linear", 3, 4), 1);
  m.layers[0].weight.setZero();
  const Matrix logits = forward(m, oracle::random_matrix(5, 3, 2));
  CHECK(logits.isZero());
  const Matrix p = softmax_rows(logits);
  for (Eigen::Index i = 0; i < p.size(); ++i) CHECK(p.data()[i] == doctest::Approx(0.25));
}

TEST_CASE("ReLU clamps a negative pre-activation") {
  Model m = init_model(parse_hypothesis("mlp:1", 1, 2), 1);
  m.layers[0].weight(0, 0) = 1.0;
  m.layers[0].bias(0) = -5.0;  // pre-activation x - 5 < 0 for x = 1
  m.layers[1].bias << 0.25, -0.75;
  const Matrix logits = forward(m, Matrix{{1.0}});
  CHECK(logits(0, 0) == 0.25);
  CHECK(logits(0, 1) == -0.75);
}

TEST_CASE("forward agrees with the per-row reference and is batch consistent") {
  for (const char* name : {"linear", "mlp:7", "mlp:9x5"}) {
    const Model m = init_model(parse_hypothesis(name, 6, 4), 3);
    const Matrix x = oracle::random_matrix(50, 6, 4);
    const Matrix batched = forward(m, x);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const Matrix single = forward(m, x.row(i));
      const auto ref = oracle::forward_row(m, {x.row(i).data(), x.row(i).data() + 6});
      for (int c = 0; c < 4; ++c) {
        CHECK(batched(i, c) == doctest::Approx(single(0, c)).epsilon(1e-12));
        CHECK(batched(i, c) == doctest::Approx(ref[c]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("argmax_rows and its tie rule") {
  CHECK(argmax_rows(Matrix{{0.2, 0.9, 0.1}}) == Labels{1});
  CHECK(argmax_rows(Matrix{{0.5, 0.5}}) == Labels{0});
  CHECK(argmax_rows(Matrix{{1.0, 3.0, 3.0}}) == Labels{1});

  const Model m = init_model(parse_hypothesis("mlp:8", 5, 6), 9);
  const Matrix x = oracle::random_matrix(1000, 5, 10);
  const Labels pred = predict(m, x);
  const Matrix p = softmax_rows(forward(m, x));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < p.cols(); ++c)
      if (p(i, c) > p(i, best)) best = c;
    CHECK(pred[i] == best);
  }
}

TEST_CASE("softmax survives large logits") {
  const Matrix p = softmax_rows(Matrix{{1000.0, 0.0}, {-1000.0, -1000.0}});
  CHECK(p(0, 0) == doctest::Approx(1.0));
  CHECK(p(0, 1) == doctest::Approx(0.0));
  CHECK(p(1, 0) == doctest::Approx(0.5));
}

TEST_CASE("capacity schedules") {
  const CapacitySchedule s = default_schedule(20, 20);
  REQUIRE(s.specs.size() == 4);
  CHECK(s.iterations() == 3);
  for (std::size_t t = 1; t < s.specs.size(); ++t) {
    CHECK(parameter_count(s.specs[t]) > parameter_count(s.specs[t - 1]));
    CHECK(s.specs[t].capacity_index == static_cast<int>(t));
  }
  CHECK(s.specs[3].name() == "mlp256x128");
  CHECK_NOTHROW(s.validate());

  CHECK_THROWS_AS(schedule_from_names({"mlp:64", "mlp:8"}, 4, 3), ValidationError);
  CapacitySchedule shrinking = s;
  std::swap(shrinking.specs[1], shrinking.specs[2]);
  CHECK_THROWS_AS(shrinking.validate(), ValidationError);

  const CapacitySchedule fixed = fixed_schedule(s.specs[0], 3);
  CHECK(fixed.iterations() == 3);
  CHECK_NOTHROW(fixed.validate());
  CHECK_THROWS_AS(CapacitySchedule{}.validate(), ValidationError);
}

TEST_CASE("model validation catches shape breaks and non-finite values") {
  Model m = init_model(parse_hypothesis("mlp:4", 3, 2), 1);
  CHECK_NOTHROW(m.validate());
  Model bad = m;
  bad.layers[1].weight.resize(3, 2);
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = m;
  bad.layers[0].bias(1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  CHECK_THROWS_AS(forward(m, Matrix(2, 4)), ShapeError);
}
