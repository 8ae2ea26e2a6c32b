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

#include "sst/runner.hpp"

#include <bit>
#include <cerrno>
#include <cstdio>
#include <cstring>

#include <fmt/format.h>
#include <json.hpp>

#include "binary_io.hpp"
#include "sst/checkpoint.hpp"
#include "sst/error.hpp"
#include "sst/eval.hpp"
#include "sst/rng.hpp"

namespace sst {

namespace fs = std::filesystem;

namespace {

fs::path resolve(const fs::path& base, const fs::path& p) {
  return p.is_absolute() ? p : base / p;
}

LabeledDataset load_source(const LabeledSource& src, const fs::path& base) {
  if (src.kind == SourceKind::kSynth) return synthesize(src.synth);
  return load_labeled(resolve(base, src.path));
}

// Exclusive ownership of a run directory.
class DirectoryLock {
 public:
  explicit DirectoryLock(fs::path path) : path_(std::move(path)) {
    std::FILE* f = std::fopen(path_.c_str(), "wx");
    if (!f)
      throw Error("run directory is locked (" + path_.string() +
                  " exists); another run is active or a previous run crashed");
    std::fclose(f);
  }
  ~DirectoryLock() {
    std::error_code ec;
    fs::remove(path_, ec);
  }
  DirectoryLock(const DirectoryLock&) = delete;
  DirectoryLock& operator=(const DirectoryLock&) = delete;

 private:
  fs::path path_;
};

std::string bits(double v) { return hex64(std::bit_cast<std::uint64_t>(v)); }
double from_bits(const std::string& s) {
  return std::bit_cast<double>(static_cast<std::uint64_t>(std::stoull(s, nullptr, 16)));
}
std::uint64_t from_hex(const std::string& s) { return std::stoull(s, nullptr, 16); }

nlohmann::json state_json(const RunReport& report) {
  nlohmann::json j;
  j["run"] = report.run_name;
  j["manifest_fingerprint"] = hex64(report.manifest_fingerprint);
  j["seed"] = report.seed;
  j["records"] = nlohmann::json::array();
  for (const auto& r : report.records) {
    j["records"].push_back({{"t", r.t},
                            {"slice_size", r.slice_size},
                            {"hypothesis", r.hypothesis.name()},
                            {"pretrain_loss", bits(r.pretrain_loss)},
                            {"top1", bits(r.top1)},
                            {"wall_seconds", bits(r.wall_seconds)},
                            {"model_fingerprint", hex64(r.model_fingerprint)},
                            {"labeler_fingerprint", hex64(r.labeler_fingerprint)}});
  }
  return j;
}

RunReport report_from_json(const nlohmann::json& j, const CapacitySchedule& schedule,
                           const std::string& source) {
  RunReport report;
  try {
    report.run_name = j.at("run").get<std::string>();
    report.manifest_fingerprint = from_hex(j.at("manifest_fingerprint").get<std::string>());
    report.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& r : j.at("records")) {
      IterationRecord rec;
      rec.t = r.at("t").get<int>();
      rec.slice_size = r.at("slice_size").get<std::size_t>();
      if (rec.t < 0 || static_cast<std::size_t>(rec.t) >= schedule.specs.size())
        throw ParseError(ParseErrorKind::kMalformed, source + ": iteration out of range");
      rec.hypothesis = schedule.specs[rec.t];
      if (r.at("hypothesis").get<std::string>() != rec.hypothesis.name())
        throw ParseError(ParseErrorKind::kFingerprintMismatch,
                         source + ": hypothesis differs from the manifest schedule");
      rec.pretrain_loss = from_bits(r.at("pretrain_loss").get<std::string>());
      rec.top1 = from_bits(r.at("top1").get<std::string>());
      rec.wall_seconds = from_bits(r.at("wall_seconds").get<std::string>());
      rec.model_fingerprint = from_hex(r.at("model_fingerprint").get<std::string>());
      rec.labeler_fingerprint = from_hex(r.at("labeler_fingerprint").get<std::string>());
      report.records.push_back(rec);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(ParseErrorKind::kMalformed, source + ": " + e.what());
  }
  report.validate();
  return report;
}

void write_atomically(const fs::path& path, std::string_view text) {
  const fs::path tmp = path.string() + ".tmp";
  detail::write_text_file(tmp, text);
  fs::rename(tmp, path);
}

}  // namespace

fs::path checkpoint_path(const fs::path& dir, int t) {
  return dir / fmt::format("checkpoint_t{}.sstc", t);
}

fs::path pseudo_label_path(const fs::path& dir, int t) {
  return dir / fmt::format("plabels_t{}.sstl", t);
}

std::string format_report_file(const RunReport& report) {
  return fmt::format("# manifest={} seed={} run={}\n", hex64(report.manifest_fingerprint),
                     report.seed, report.run_name) +
         format_iteration_table(report);
}

void save_normalization(const fs::path& path, const NormalizationStats& stats) {
  UnlabeledSlice s;
  s.features.resize(2, stats.mean.size());
  s.features.row(0) = stats.mean.transpose();
  s.features.row(1) = stats.std.transpose();
  s.source_id = "normalization";
  save_dataset(path, s);
}

NormalizationStats load_normalization(const fs::path& path) {
  const UnlabeledSlice s = load_unlabeled(path);
  if (s.features.rows() != 2)
    throw ParseError(ParseErrorKind::kMalformed, path.string() + ": expected 2 rows (mean, std)");
  NormalizationStats stats;
  stats.mean = s.features.row(0).transpose();
  stats.std = s.features.row(1).transpose();
  if ((stats.std.array() <= 0.0).any())
    throw ParseError(ParseErrorKind::kMalformed, path.string() + ": std must be positive");
  return stats;
}

MaterializedRun materialize(const RunManifest& m, const fs::path& base) {
  MaterializedRun run;
  run.manifest_fingerprint = manifest_fingerprint(m);

  LabeledDataset full = load_source(m.task.source, base);
  full.validate();
  run.s = m.task.n_per_class == 0 ? std::move(full)
                                  : few_shot_sample(full, m.task.n_per_class, m.task.sample_seed);

  switch (m.stream.kind) {
    case StreamKind::kSynth: {
      if (m.task.source.kind != SourceKind::kSynth)
        throw ValidationError("stream", "synth stream requires a synth task");
      std::size_t total = 0;
      for (auto s : m.stream.sizes) total += s;
      SynthSpec pool = m.task.source.synth;
      pool.num_samples = m.stream.pool_size ? m.stream.pool_size : total;
      pool.seed = derive_seed(m.stream.seed, "stream_pool");
      run.slices = make_stream(synthesize(pool).features, m.stream.sizes, m.stream.seed, "synth");
      break;
    }
    case StreamKind::kPool: {
      const fs::path p = resolve(base, m.stream.pool_path);
      run.slices = make_stream(load_unlabeled(p).features, m.stream.sizes, m.stream.seed, p.string());
      break;
    }
    case StreamKind::kSlices:
      for (std::size_t t = 0; t < m.stream.slice_paths.size(); ++t) {
        const fs::path p = resolve(base, m.stream.slice_paths[t]);
        UnlabeledSlice s = load_unlabeled(p);
        s.slice_index = static_cast<int>(t + 1);
        s.source_id = p.string();
        run.slices.push_back(std::move(s));
      }
      break;
  }

  run.eval = load_source(m.eval.source, base);
  if (run.eval.num_classes != run.s.num_classes)
    throw ShapeError("eval num_classes", run.s.num_classes, run.eval.num_classes);

  if (m.task.normalize) {
    run.normalization = fit_normalization(run.s);
    run.s.features = apply_normalization(*run.normalization, run.s.features);
    for (auto& u : run.slices) u.features = apply_normalization(*run.normalization, u.features);
    run.eval.features = apply_normalization(*run.normalization, run.eval.features);
  }

  run.schedule = m.resolve_schedule(static_cast<int>(run.s.dim()), run.s.num_classes);
  std::vector<std::size_t> sizes;
  for (const auto& u : run.slices) sizes.push_back(static_cast<std::size_t>(u.features.rows()));
  run.configs = m.stream_configs(sizes);
  return run;
}

RunOutcome run_manifest(const RunManifest& m, const RunOptions& options) {
  const MaterializedRun data = materialize(m, options.base_dir);
  const bool no_stream = options.mode == RunMode::kNoStream;
  const fs::path root = resolve(options.base_dir, m.output_dir);
  const fs::path out_dir = no_stream ? root / "no_stream" : root;
  fs::create_directories(out_dir);
  DirectoryLock lock(out_dir / ".lock");

  const std::uint64_t fp = data.manifest_fingerprint;
  detail::write_text_file(out_dir / "manifest.cfg", serialize_manifest(m));
  if (data.normalization) save_normalization(out_dir / "normalization.sstd", *data.normalization);

  StreamOptions so;
  so.seed = m.seed;
  so.manifest_fingerprint = fp;
  so.threads = options.threads;
  so.stop_after = options.stop_after;
  if (!options.record_wall_time) so.clock = [] { return 0.0; };

  RunOutcome outcome;
  outcome.output_dir = out_dir;

  const fs::path state_path = out_dir / "run_state.json";
  if (options.resume && !no_stream && fs::exists(state_path)) {
    const auto j = nlohmann::json::parse(detail::read_text_file(state_path), nullptr, false);
    if (j.is_discarded())
      throw ParseError(ParseErrorKind::kMalformed, state_path.string() + ": invalid json");
    RunReport prior = report_from_json(j, data.schedule, state_path.string());
    if (prior.manifest_fingerprint != fp)
      throw ParseError(ParseErrorKind::kFingerprintMismatch,
                       state_path.string() + ": run state belongs to manifest " +
                           hex64(prior.manifest_fingerprint) + ", this manifest is " + hex64(fp));
    if (!prior.records.empty()) {
      const int last = prior.records.back().t;
      Checkpoint ck = load_checkpoint(checkpoint_path(out_dir, last), fp);
      if (ck.iteration != last || fingerprint(ck.model) != prior.records.back().model_fingerprint)
        throw ParseError(ParseErrorKind::kFingerprintMismatch,
                         fmt::format("checkpoint_t{} does not match the recorded model", last));
      so.resume = ResumePoint{std::move(ck.model), last, prior.records};
      outcome.resumed_after = last;
    }
  }

  so.on_iteration = [&](const IterationState& st) {
    save_checkpoint(checkpoint_path(out_dir, st.t), *st.model, st.t, fp);
    if (st.pseudo) save_pseudo_labels(pseudo_label_path(out_dir, st.t), *st.pseudo);
    RunReport partial = *st.report;
    write_atomically(state_path, state_json(partial).dump(2) + "\n");
    write_atomically(out_dir / "report.csv", format_report_file(partial));
  };

  if (no_stream) {
    outcome.result = no_streaming_run(data.s, data.slices, data.schedule, data.configs, data.eval, so);
  } else if (so.resume && static_cast<std::size_t>(so.resume->completed) ==
                              data.schedule.iterations()) {
    // Already complete: restore without recomputing.
    outcome.result.model = so.resume->model;
    outcome.result.report.records = so.resume->records;
    outcome.result.report.manifest_fingerprint = fp;
    outcome.result.report.seed = m.seed;
  } else {
    outcome.result = stream_learning(data.s, data.slices, data.schedule, data.configs, data.eval, so);
  }
  outcome.result.report.run_name = no_stream ? "no_stream" : "stream";
  outcome.complete = outcome.result.report.records.size() ==
                     (no_stream ? 2 : data.schedule.iterations() + 1);
  write_atomically(out_dir / "report.csv", format_report_file(outcome.result.report));
  return outcome;
}

}  // namespace sst
