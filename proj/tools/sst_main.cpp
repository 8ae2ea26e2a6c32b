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

// sst: command-line front end for the streaming self-training engine.
//
// Every failure prints exactly one line to stderr,
//   error category=<category> exit=<code> message=<text>
// and exits with one of the codes in `Exit`.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "sst/checkpoint.hpp"
#include "sst/dataset.hpp"
#include "sst/error.hpp"
#include "sst/eval.hpp"
#include "sst/manifest.hpp"
#include "sst/model.hpp"
#include "sst/optim.hpp"
#include "sst/plan.hpp"
#include "sst/rng.hpp"
#include "sst/runner.hpp"
#include "sst/selftrain.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kConfig = 3,
  kFormat = 4,
  kInvalid = 5,
  kDiverged = 6,
  kCheckFailed = 7,
};

int threads_from_env() {
  const char* v = std::getenv("SST_THREADS");
  if (!v || !*v) return 1;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 1 || n > 1024)
    throw sst::ValidationError("SST_THREADS", fmt::format("expected an integer in [1, 1024], got '{}'", v));
  return static_cast<int>(n);
}

std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

int fail(const char* category, int code, const std::string& message) {
  std::fprintf(stderr, "error category=%s exit=%d message=%s\n", category, code,
               one_line(message).c_str());
  return code;
}

// ---- subcommands ---------------------------------------------------------

struct SynthArgs {
  std::string kind = "gaussian_mixture";
  int classes = 2;
  int dim = 2;
  std::size_t samples = 1000;
  double separation = 1.0;
  std::uint64_t seed = 0;
  bool unlabeled = false;
  std::string from_csv;
  std::string output;
};

int run_synth(const SynthArgs& a) {
  if (!a.from_csv.empty()) {
    const sst::AnyDataset d = sst::import_csv(fs::path(a.from_csv), a.classes > 2 ? a.classes : 0);
    std::visit([&](const auto& ds) { sst::save_dataset(a.output, ds); }, d);
    std::printf("wrote %s\n", a.output.c_str());
    return kOk;
  }
  sst::SynthSpec spec;
  spec.kind = sst::parse_synth_kind(a.kind);
  spec.num_classes = a.classes;
  spec.dim = a.dim;
  spec.num_samples = a.samples;
  spec.separation = a.separation;
  spec.seed = a.seed;
  const sst::LabeledDataset ds = sst::synthesize(spec);
  if (a.unlabeled) {
    sst::UnlabeledSlice u;
    u.features = ds.features;
    u.source_id = a.output;
    sst::save_dataset(a.output, u);
  } else {
    sst::save_dataset(a.output, ds);
  }
  std::printf("wrote %s rows=%zu dim=%zu labeled=%d\n", a.output.c_str(), ds.size(), ds.dim(),
              a.unlabeled ? 0 : 1);
  return kOk;
}

struct TrainArgs {
  std::string data;
  std::string hypothesis = "linear";
  std::string init_from;
  int epochs = 60;
  int batch_size = 32;
  double lr = 0.1;
  double momentum = 0.9;
  double weight_decay = 1e-4;
  std::uint64_t seed = 0;
  std::string output;
};

int run_train(const TrainArgs& a) {
  const sst::LabeledDataset d = sst::load_labeled(a.data);
  sst::TrainConfig cfg = sst::TrainConfig::with_tail_decay(a.epochs, a.batch_size);
  cfg.initial_lr = a.lr;
  cfg.momentum = a.momentum;
  cfg.weight_decay = a.weight_decay;
  cfg.seed = sst::derive_seed(a.seed, "shuffle");
  sst::TrainResult r;
  if (a.init_from.empty()) {
    const sst::HypothesisSpec spec = sst::parse_hypothesis(
        a.hypothesis, static_cast<int>(d.dim()), d.num_classes);
    r = sst::learn(spec, d, cfg, a.seed);
  } else {
    r = sst::finetune(sst::load_checkpoint(a.init_from).model, d, cfg);
  }
  sst::save_checkpoint(a.output, r.model, 0, 0);
  const sst::EvalReport e = sst::evaluate(r.model, d);
  std::printf("hypothesis,%s\nparams,%zu\nepochs,%d\nfinal_loss,%.6f\ntrain_top1,%.4f\n",
              r.model.spec.name().c_str(), r.model.parameter_count(), r.trace.epochs_run,
              r.trace.final_loss, e.top1);
  return kOk;
}

struct PseudoArgs {
  std::string checkpoint;
  std::string input;
  std::string output;
  std::string dataset_output;
};

int run_pseudo_label(const PseudoArgs& a, int threads) {
  const sst::Checkpoint ck = sst::load_checkpoint(a.checkpoint);
  const sst::UnlabeledSlice u = sst::load_unlabeled(a.input);
  const sst::PseudoLabeledDataset p = sst::pseudo_label(ck.model, u, threads);
  sst::save_pseudo_labels(a.output, p);
  if (!a.dataset_output.empty()) {
    sst::LabeledDataset d;
    d.features = p.features;
    d.labels = p.pseudo_labels;
    d.num_classes = p.num_classes;
    sst::save_dataset(a.dataset_output, d);
  }
  std::vector<std::size_t> counts(static_cast<std::size_t>(p.num_classes), 0);
  for (auto z : p.pseudo_labels) ++counts[static_cast<std::size_t>(z)];
  std::printf("rows,%zu\nlabeler,%s\n", p.size(), sst::hex64(p.labeler_fingerprint).c_str());
  std::printf("class,count\n");
  for (std::size_t k = 0; k < counts.size(); ++k) std::printf("%zu,%zu\n", k, counts[k]);
  return kOk;
}

struct RunArgs {
  std::string manifest;
  std::optional<std::uint64_t> seed;
  std::string output;
  bool resume = false;
  std::optional<int> stop_after;
  bool record_wall_time = false;
};

int run_stream(const RunArgs& a, sst::RunMode mode, int threads) {
  sst::RunManifest m = sst::load_manifest(a.manifest);
  if (a.seed) m.seed = *a.seed;
  if (!a.output.empty()) m.output_dir = a.output;
  sst::RunOptions opt;
  opt.mode = mode;
  opt.resume = a.resume;
  opt.stop_after = a.stop_after;
  opt.record_wall_time = a.record_wall_time;
  opt.threads = threads;
  opt.base_dir = fs::path(a.manifest).parent_path();
  if (opt.base_dir.empty()) opt.base_dir = ".";
  const sst::RunOutcome out = sst::run_manifest(m, opt);
  std::fputs(sst::format_report_file(out.result.report).c_str(), stdout);
  std::printf("# output=%s complete=%d resumed_after=%d\n", out.output_dir.string().c_str(),
              out.complete ? 1 : 0, out.resumed_after);
  return kOk;
}

struct PlanArgs {
  std::string file;
  std::optional<double> rate;
};

int run_plan(const PlanArgs& a) {
  sst::PlanFile f;
  if (a.file.empty()) {
    f.plans = {{"stream", sst::reference_streaming_plan()},
               {"no_stream", sst::reference_no_streaming_plan()}};
  } else {
    f = sst::load_plan_file(a.file);
  }
  const double rate = a.rate ? *a.rate : f.rate_usd.value_or(5.0);
  if (!(rate >= 0.0)) throw sst::ValidationError("rate-usd", "must be >= 0");
  std::fputs(sst::format_plan_report(f, rate).c_str(), stdout);
  return kOk;
}

struct EvalArgs {
  std::string checkpoint;
  std::string test;
};

int run_eval(const EvalArgs& a) {
  const sst::Checkpoint ck = sst::load_checkpoint(a.checkpoint);
  const sst::LabeledDataset test = sst::load_labeled(a.test);
  if (test.dim() != static_cast<std::size_t>(ck.model.spec.input_dim))
    throw sst::ShapeError("test dim", ck.model.spec.input_dim, static_cast<std::int64_t>(test.dim()));
  std::fputs(sst::format_eval_report(sst::evaluate(ck.model, test)).c_str(), stdout);
  return kOk;
}

struct GradCheckArgs {
  std::string checkpoint;
  std::string data;
  std::string hypothesis;
  int dim = 4;
  int classes = 3;
  int batch = 6;
  double step = 1e-6;
  double tolerance = 1e-5;
  std::uint64_t seed = 0;
};

int run_grad_check(const GradCheckArgs& a) {
  std::vector<sst::Model> models;
  int dim = a.dim, classes = a.classes;
  if (!a.checkpoint.empty()) {
    models.push_back(sst::load_checkpoint(a.checkpoint).model);
    dim = models.back().spec.input_dim;
    classes = models.back().spec.num_classes;
  } else {
    const sst::CapacitySchedule sched =
        a.hypothesis.empty()
            ? sst::default_schedule(dim, classes)
            : sst::CapacitySchedule{{sst::parse_hypothesis(a.hypothesis, dim, classes)}};
    for (std::size_t i = 0; i < sched.specs.size(); ++i)
      models.push_back(sst::init_model(sched.specs[i], sst::derive_seed(a.seed, "grad_check", i)));
  }

  sst::Matrix x;
  sst::Labels y;
  if (!a.data.empty()) {
    const sst::LabeledDataset d = sst::load_labeled(a.data);
    const auto n = std::min<Eigen::Index>(a.batch, d.features.rows());
    x = d.features.topRows(n);
    y.assign(d.labels.begin(), d.labels.begin() + n);
  } else {
    if (a.batch < 1) throw sst::ValidationError("batch", "must be >= 1");
    sst::SplitMix64 rng(sst::derive_seed(a.seed, "grad_check_batch"));
    x.resize(a.batch, dim);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
    for (int i = 0; i < a.batch; ++i) y.push_back(static_cast<std::int32_t>(rng.below(classes)));
  }

  bool ok = true;
  std::printf("hypothesis,params,max_rel_error,status\n");
  for (const auto& m : models) {
    const double err = sst::grad_check(m, x, y, a.step);
    const bool pass = err <= a.tolerance;
    ok = ok && pass;
    std::printf("%s,%zu,%.3e,%s\n", m.spec.name().c_str(), m.parameter_count(), err,
                pass ? "PASS" : "FAIL");
  }
  if (!ok)
    return fail("check_failed", kCheckFailed,
                fmt::format("gradient error above tolerance {:g}", a.tolerance));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming self-training engine"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "sst 0.1.0");

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Generate a synthetic dataset file");
  c_synth->add_option("--kind", synth.kind, "gaussian_mixture, xor or rings")->capture_default_str();
  c_synth->add_option("--classes", synth.classes)->capture_default_str();
  c_synth->add_option("--dim", synth.dim)->capture_default_str();
  c_synth->add_option("--samples", synth.samples)->capture_default_str();
  c_synth->add_option("--separation", synth.separation)->capture_default_str();
  c_synth->add_option("--seed", synth.seed)->capture_default_str();
  c_synth->add_flag("--unlabeled", synth.unlabeled, "Write features only");
  c_synth->add_option("--from-csv", synth.from_csv, "Convert a CSV file instead of sampling");
  c_synth->add_option("--output", synth.output)->required();

  TrainArgs train;
  auto* c_train = app.add_subcommand("train", "Train or fine-tune a model on a labeled file");
  c_train->add_option("--data", train.data)->required();
  c_train->add_option("--hypothesis", train.hypothesis)->capture_default_str();
  c_train->add_option("--checkpoint", train.init_from, "Fine-tune this model instead");
  c_train->add_option("--epochs", train.epochs)->capture_default_str();
  c_train->add_option("--batch-size", train.batch_size)->capture_default_str();
  c_train->add_option("--lr", train.lr)->capture_default_str();
  c_train->add_option("--momentum", train.momentum)->capture_default_str();
  c_train->add_option("--weight-decay", train.weight_decay)->capture_default_str();
  c_train->add_option("--seed", train.seed)->capture_default_str();
  c_train->add_option("--output", train.output)->required();

  PseudoArgs pseudo;
  auto* c_pseudo = app.add_subcommand("pseudo-label", "Label an unlabeled file with a checkpoint");
  c_pseudo->add_option("--checkpoint", pseudo.checkpoint)->required();
  c_pseudo->add_option("--input", pseudo.input)->required();
  c_pseudo->add_option("--output", pseudo.output, "Pseudo-label cache (.sstl)")->required();
  c_pseudo->add_option("--dataset-output", pseudo.dataset_output, "Also write a labeled dataset");

  RunArgs stream_args, no_stream_args;
  auto add_run_options = [](CLI::App* c, RunArgs& a) {
    c->add_option("--manifest", a.manifest)->required();
    c->add_option("--seed", a.seed, "Override the manifest seed");
    c->add_option("--output", a.output, "Override the manifest output_dir");
    c->add_flag("--resume", a.resume, "Continue from the last completed iteration");
    c->add_option("--stop-after", a.stop_after, "Stop after this iteration");
    c->add_flag("--record-wall-time", a.record_wall_time, "Store real timings in the report");
  };
  auto* c_stream = app.add_subcommand("stream-run", "Run StreamLearning from a manifest");
  add_run_options(c_stream, stream_args);
  auto* c_no_stream =
      app.add_subcommand("no-stream-run", "Run the single-iteration baseline from a manifest");
  add_run_options(c_no_stream, no_stream_args);

  PlanArgs plan;
  auto* c_plan = app.add_subcommand("plan", "Estimate training hours and cost");
  c_plan->add_option("--file", plan.file, "Plan file; defaults to the reference schedules");
  c_plan->add_option("--rate-usd", plan.rate, "USD per hour (default 5)");

  EvalArgs eval;
  auto* c_eval = app.add_subcommand("eval", "Evaluate a checkpoint on a labeled file");
  c_eval->add_option("--checkpoint", eval.checkpoint)->required();
  c_eval->add_option("--test", eval.test)->required();

  GradCheckArgs gc;
  auto* c_gc = app.add_subcommand("grad-check", "Compare backprop against finite differences");
  c_gc->add_option("--checkpoint", gc.checkpoint);
  c_gc->add_option("--data", gc.data, "Labeled file to draw the batch from");
  c_gc->add_option("--hypothesis", gc.hypothesis, "Single spec instead of the default schedule");
  c_gc->add_option("--dim", gc.dim)->capture_default_str();
  c_gc->add_option("--classes", gc.classes)->capture_default_str();
  c_gc->add_option("--batch", gc.batch)->capture_default_str();
  c_gc->add_option("--step", gc.step)->capture_default_str();
  c_gc->add_option("--tolerance", gc.tolerance)->capture_default_str();
  c_gc->add_option("--seed", gc.seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", kUsage, e.what());
  }

  try {
    const int threads = threads_from_env();
    if (*c_synth) return run_synth(synth);
    if (*c_train) return run_train(train);
    if (*c_pseudo) return run_pseudo_label(pseudo, threads);
    if (*c_stream) return run_stream(stream_args, sst::RunMode::kStream, threads);
    if (*c_no_stream) return run_stream(no_stream_args, sst::RunMode::kNoStream, threads);
    if (*c_plan) return run_plan(plan);
    if (*c_eval) return run_eval(eval);
    if (*c_gc) return run_grad_check(gc);
  } catch (const sst::ConfigError& e) {
    return fail("config", kConfig, e.what());
  } catch (const sst::ParseError& e) {
    return fail("format", kFormat, e.what());
  } catch (const sst::DivergenceError& e) {
    return fail("divergence", kDiverged, e.what());
  } catch (const sst::Error& e) {
    return fail("invalid", kInvalid, e.what());
  } catch (const std::exception& e) {
    return fail("internal", kFailure, e.what());
  }
  return kUsage;
}
