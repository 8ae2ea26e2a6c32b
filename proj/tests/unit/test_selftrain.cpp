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
#include "sst/rng.hpp"
#include "sst/selftrain.hpp"

using namespace sst;

namespace {

SynthSpec mixture(int classes, int dim, std::size_t n, double sep, std::uint64_t seed) {
  SynthSpec s;
  s.num_classes = classes;
  s.dim = dim;
  s.num_samples = n;
  s.separation = sep;
  s.seed = seed;
  return s;
}

UnlabeledSlice unlabeled(const LabeledDataset& d, int index = 1) {
  UnlabeledSlice u;
  u.features = d.features;
  u.slice_index = index;
  return u;
}

struct SmallStream {
  LabeledDataset s, test;
  std::vector<UnlabeledSlice> slices;
  CapacitySchedule schedule;
  StreamConfigs configs;
};

SmallStream small_stream() {
  SmallStream w;
  w.s = few_shot_sample(synthesize(mixture(3, 4, 120, 3.0, 1)), 6, 2);
  w.test = synthesize(mixture(3, 4, 300, 3.0, 3));
  const std::vector<std::size_t> sizes = {60, 90, 120};
  w.slices = make_stream(synthesize(mixture(3, 4, 270, 3.0, 4)).features, sizes, 5);
  w.schedule = schedule_from_names({"linear", "mlp:6", "mlp:8", "mlp:8x4"}, 4, 3);
  w.configs.init = TrainConfig::with_tail_decay(8, 6);
  w.configs.finetune = TrainConfig::with_tail_decay(2, 6);
  for (int e : {6, 4, 3}) w.configs.pretrain.push_back(TrainConfig::with_tail_decay(e, 16));
  return w;
}

}  // namespace

TEST_CASE("constant predictor labels everything with its class") {
  Model m = init_model(parse_hypothesis("linear", 3, 4), 1);
  m.layers[0].weight.setZero();
  m.layers[0].bias << 2.0, 1.0, 0.0, -1.0;
  UnlabeledSlice u;
  u.features = oracle::random_matrix(50, 3, 2);
  const PseudoLabeledDataset p = pseudo_label(m, u);
  for (auto z : p.pseudo_labels) CHECK(z == 0);
  CHECK(p.labeler_fingerprint == fingerprint(m));
  CHECK(p.num_classes == 4);
  CHECK(p.features == u.features);
}

TEST_CASE("pseudo-labels follow the Bayes rule on separated gaussians") {
  const SynthSpec spec = mixture(2, 2, 400, 10.0, 7);
  const LabeledDataset d = synthesize(spec);
  const Model m = learn(parse_hypothesis("linear", 2, 2), d, TrainConfig::with_tail_decay(20), 1).model;
  SynthSpec slice_spec = spec;
  slice_spec.num_samples = 5000;
  slice_spec.seed = 8;
  const UnlabeledSlice u = unlabeled(synthesize(slice_spec));
  const PseudoLabeledDataset p = pseudo_label(m, u);

  // Equal priors and shared isotropic noise: Bayes picks the nearest mean.
  const Matrix mu = gaussian_mixture_means(spec);
  std::size_t agree = 0;
  for (Eigen::Index i = 0; i < u.features.rows(); ++i) {
    const int bayes = (u.features.row(i) - mu.row(0)).squaredNorm() <=
                              (u.features.row(i) - mu.row(1)).squaredNorm()
                          ? 0
                          : 1;
    agree += p.pseudo_labels[i] == bayes;
  }
  CHECK(static_cast<double>(agree) / u.size() >= 0.99);
}

TEST_CASE("hard labels minimize per-example cross-entropy") {
  const Model m = init_model(parse_hypothesis("mlp:16", 5, 7), 3);
  UnlabeledSlice u;
  u.features = oracle::random_matrix(1000, 5, 4, 2.0);
  const PseudoLabeledDataset p = pseudo_label(m, u);
  std::size_t violations = 0;
  for (Eigen::Index i = 0; i < u.features.rows(); ++i) {
    const auto logits = oracle::forward_row(m, {u.features.row(i).data(), u.features.row(i).data() + 5});
    const double chosen = oracle::row_ce(logits, p.pseudo_labels[i]);
    for (int c = 0; c < 7; ++c) violations += oracle::row_ce(logits, c) < chosen;
  }
  CHECK(violations == 0);
}

TEST_CASE("threaded pseudo-labeling matches the serial result") {
  const Model m = init_model(parse_hypothesis("mlp:8", 3, 5), 1);
  UnlabeledSlice u;
  u.features = oracle::random_matrix(1001, 3, 2);
  const Labels serial = pseudo_label(m, u, 1).pseudo_labels;
  for (int t : {2, 3, 8}) CHECK(pseudo_label(m, u, t).pseudo_labels == serial);
}

TEST_CASE("joint objective") {
  const LabeledDataset s = synthesize(mixture(3, 2, 30, 2.0, 1));
  Model uniform = init_model(parse_hypothesis("linear", 2, 3), 1);
  uniform.layers[0].weight.setZero();
  UnlabeledSlice u;
  u.features = oracle::random_matrix(20, 2, 5);
  CHECK(joint_objective(uniform, s, pseudo_label(uniform, u)) ==
        doctest::Approx(50 * std::log(3.0)).epsilon(1e-12));

  const Model m = init_model(parse_hypothesis("mlp:5", 2, 3), 2);
  PseudoLabeledDataset empty;
  empty.features = Matrix(0, 2);
  empty.num_classes = 3;
  CHECK(joint_objective(m, s, empty) ==
        doctest::Approx(summed_cross_entropy(forward(m, s.features), s.labels)));

  SUBCASE("relabeling with F fixed never increases the objective") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      PseudoLabeledDataset arbitrary = pseudo_label(m, u);
      arbitrary.pseudo_labels = oracle::random_labels(20, 3, seed);
      const double before = joint_objective(m, s, arbitrary);
      const double after = joint_objective(m, s, pseudo_label(m, u));
      CHECK(after <= before);
    }
  }
}

TEST_CASE("exact coordinate descent is monotone and reaches a fixed point") {
  const SynthSpec spec = mixture(2, 2, 40, 4.0, 21);
  const LabeledDataset s = synthesize(spec);
  SynthSpec uspec = spec;
  uspec.num_samples = 400;
  uspec.seed = 22;
  const UnlabeledSlice u = unlabeled(synthesize(uspec));
  const CoordinateDescentTrace tr =
      exact_cd_run(s, u, parse_hypothesis("linear", 2, 2), 10, TrainConfig::with_tail_decay(10, 8), 3);
  REQUIRE(tr.objective.size() == 20);
  for (std::size_t k = 1; k < tr.objective.size(); ++k)
    CHECK(tr.objective[k] <= tr.objective[k - 1] + 1e-6 * (1 + std::abs(tr.objective[k - 1])));
  CHECK(tr.fixed_point_iteration >= 1);
  CHECK(tr.fixed_point_iteration <= 10);
  CHECK(tr.label_changes.front() == 400);
  CHECK(tr.label_changes[static_cast<std::size_t>(tr.fixed_point_iteration - 1)] == 0);

  const auto one = exact_cd_run(s, u, parse_hypothesis("linear", 2, 2), 1, TrainConfig::with_tail_decay(10, 8), 3);
  CHECK(one.objective.size() == 2);
  CHECK_THROWS_AS(exact_cd_run(s, u, parse_hypothesis("mlp:4", 2, 2), 3, TrainConfig::with_tail_decay(2), 3),
                  ValidationError);
}

TEST_CASE("stream_learning with no slices is the init model") {
  SmallStream w = small_stream();
  const CapacitySchedule init_only{{w.schedule.specs[0]}};
  w.configs.pretrain.clear();
  StreamOptions opt;
  opt.seed = 4;
  const StreamResult r = stream_learning(w.s, {}, init_only, w.configs, w.test, opt);
  REQUIRE(r.report.records.size() == 1);
  CHECK(r.report.records[0].t == 0);
  CHECK(r.report.records[0].slice_size == 0);
  const Model direct = learn(init_only.specs[0], w.s, [&] {
    TrainConfig c = w.configs.init;
    c.seed = derive_seed(4 ^ SplitMix64::mix(w.configs.init.seed), "init", 0);
    return c;
  }(), derive_seed(4, "init_model")).model;
  CHECK(r.model.spec == init_only.specs[0]);
  CHECK(r.report.records[0].top1 == doctest::Approx(evaluate(r.model, w.test).top1));
  CHECK(r.model.same_parameters(direct));
}

TEST_CASE("stream_learning bookkeeping") {
  const SmallStream w = small_stream();
  std::vector<std::uint64_t> model_fp, labeler_fp;
  StreamOptions opt;
  opt.seed = 9;
  opt.on_iteration = [&](const IterationState& st) {
    model_fp.push_back(fingerprint(*st.model));
    labeler_fp.push_back(st.pseudo ? st.pseudo->labeler_fingerprint : 0);
    if (st.pseudo) CHECK(st.pseudo->source_slice_index == st.t);
  };
  const StreamResult r = stream_learning(w.s, w.slices, w.schedule, w.configs, w.test, opt);
  REQUIRE(r.report.records.size() == 4);
  CHECK_NOTHROW(r.report.validate());
  for (int t = 0; t <= 3; ++t) {
    const IterationRecord& rec = r.report.records[t];
    CHECK(rec.t == t);
    CHECK(rec.hypothesis == w.schedule.specs[t]);
    CHECK(rec.slice_size == (t == 0 ? 0 : w.slices[t - 1].size()));
    CHECK(rec.model_fingerprint == model_fp[t]);
    // Slice t is labeled by the model that came out of iteration t - 1.
    if (t > 0) CHECK(rec.labeler_fingerprint == model_fp[t - 1]);
    if (t > 0) CHECK(labeler_fp[t] == model_fp[t - 1]);
  }
  CHECK(fingerprint(r.model) == model_fp.back());
  CHECK(r.model.spec == w.schedule.specs.back());
}

TEST_CASE("stream_learning is deterministic and resumes bit-exactly") {
  const SmallStream w = small_stream();
  StreamOptions opt;
  opt.seed = 12;
  const StreamResult full = stream_learning(w.s, w.slices, w.schedule, w.configs, w.test, opt);
  const StreamResult again = stream_learning(w.s, w.slices, w.schedule, w.configs, w.test, opt);
  CHECK(again.model.same_parameters(full.model));

  for (int stop = 0; stop < 3; ++stop) {
    StreamOptions first = opt;
    first.stop_after = stop;
    const StreamResult part = stream_learning(w.s, w.slices, w.schedule, w.configs, w.test, first);
    CHECK(part.report.records.size() == static_cast<std::size_t>(stop + 1));
    StreamOptions second = opt;
    second.resume = ResumePoint{part.model, stop, part.report.records};
    const StreamResult rest = stream_learning(w.s, w.slices, w.schedule, w.configs, w.test, second);
    CHECK(rest.model.same_parameters(full.model));
    REQUIRE(rest.report.records.size() == 4);
    for (int t = 0; t < 4; ++t)
      CHECK(rest.report.records[t].model_fingerprint == full.report.records[t].model_fingerprint);
  }

  StreamOptions other = opt;
  other.seed = 13;
  CHECK_FALSE(stream_learning(w.s, w.slices, w.schedule, w.configs, w.test, other)
                  .model.same_parameters(full.model));
}

TEST_CASE("stream_learning validates its inputs") {
  SmallStream w = small_stream();
  SUBCASE("schedule length") {
    const CapacitySchedule short_schedule{{w.schedule.specs[0], w.schedule.specs[1]}};
    CHECK_THROWS_AS(stream_learning(w.s, w.slices, short_schedule, w.configs, w.test), ValidationError);
  }
  SUBCASE("pretrain configs") {
    w.configs.pretrain.pop_back();
    CHECK_THROWS_AS(stream_learning(w.s, w.slices, w.schedule, w.configs, w.test), ValidationError);
  }
  SUBCASE("slice dims") {
    w.slices[1].features = Matrix::Zero(5, 3);
    CHECK_THROWS_AS(stream_learning(w.s, w.slices, w.schedule, w.configs, w.test), ShapeError);
  }
}

TEST_CASE("no_streaming_run makes one pass over the whole stream") {
  const SmallStream w = small_stream();
  StreamOptions opt;
  opt.seed = 12;
  const StreamResult r = no_streaming_run(w.s, w.slices, w.schedule, w.configs, w.test, opt);
  REQUIRE(r.report.records.size() == 2);
  CHECK(r.report.run_name == "no_stream");
  CHECK(r.report.records[1].slice_size == 60 + 90 + 120);
  CHECK(r.report.records[1].hypothesis == w.schedule.specs.back());
  CHECK(r.report.records[1].labeler_fingerprint == r.report.records[0].model_fingerprint);
  // Same seed, same init model as the streaming run.
  const StreamResult s = stream_learning(w.s, w.slices, w.schedule, w.configs, w.test, opt);
  CHECK(s.report.records[0].model_fingerprint == r.report.records[0].model_fingerprint);
}
