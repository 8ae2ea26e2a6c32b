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

#include "sst/manifest.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <set>

#include <fmt/format.h>

#include "binary_io.hpp"
#include "sst/error.hpp"
#include "sst/ini.hpp"
#include "sst/rng.hpp"

namespace sst {

std::size_t StreamSection::slice_count() const noexcept {
  return kind == StreamKind::kSlices ? slice_paths.size() : sizes.size();
}

std::string hex64(std::uint64_t v) { return fmt::format("{:016x}", v); }

std::vector<std::string> schedule_preset(std::string_view name, std::size_t iterations) {
  if (name == "default") return {"linear", "mlp32", "mlp128", "mlp256x128"};
  if (name == "fixed_linear") return std::vector<std::string>(iterations + 1, "linear");
  throw ValidationError("preset", "unknown schedule preset '" + std::string(name) + "'");
}

namespace {

// Typed accessors over one section that remember which keys were read,
// so leftovers can be reported as unknown.
class SectionReader {
 public:
  explicit SectionReader(const IniSection& sec) : sec_(sec) {}

  const IniEntry* get(std::string_view key) {
    used_.insert(std::string(key));
    return sec_.find(key);
  }
  const IniEntry& require(std::string_view key) {
    const IniEntry* e = get(key);
    if (!e) throw ConfigError(sec_.line, std::string(key), "required in [" + sec_.name + "]");
    return *e;
  }

  std::string str(std::string_view key, std::string fallback) {
    const IniEntry* e = get(key);
    return e ? e->value : fallback;
  }
  double real(std::string_view key, double fallback) {
    const IniEntry* e = get(key);
    return e ? to_real(*e) : fallback;
  }
  std::int64_t integer(std::string_view key, std::int64_t fallback) {
    const IniEntry* e = get(key);
    return e ? to_int(*e) : fallback;
  }
  std::uint64_t u64(std::string_view key, std::uint64_t fallback) {
    const IniEntry* e = get(key);
    if (!e) return fallback;
    try {
      std::size_t used = 0;
      const auto v = std::stoull(e->value, &used, 0);
      if (used != e->value.size() || e->value.front() == '-') throw std::invalid_argument("junk");
      return v;
    } catch (const std::exception&) {
      throw ConfigError(e->line, e->key, "expected an unsigned integer, got '" + e->value + "'");
    }
  }
  bool boolean(std::string_view key, bool fallback) {
    const IniEntry* e = get(key);
    if (!e) return fallback;
    if (e->value == "true" || e->value == "1") return true;
    if (e->value == "false" || e->value == "0") return false;
    throw ConfigError(e->line, e->key, "expected true or false");
  }
  std::vector<std::int64_t> int_list(const IniEntry& e) {
    std::vector<std::int64_t> out;
    for (const auto& item : split_list(e.value)) out.push_back(to_int({e.key, item, e.line}));
    return out;
  }

  void reject_unknown() const {
    for (const auto& e : sec_.entries)
      if (!used_.count(e.key)) throw ConfigError(e.line, e.key, "unknown key in [" + sec_.name + "]");
  }

  int line() const noexcept { return sec_.line; }
  const std::string& name() const noexcept { return sec_.name; }

  static double to_real(const IniEntry& e) {
    try {
      std::size_t used = 0;
      const double v = std::stod(e.value, &used);
      if (used != e.value.size()) throw std::invalid_argument("junk");
      return v;
    } catch (const std::exception&) {
      throw ConfigError(e.line, e.key, "expected a number, got '" + e.value + "'");
    }
  }
  static std::int64_t to_int(const IniEntry& e) {
    try {
      std::size_t used = 0;
      const auto v = std::stoll(e.value, &used);
      if (used != e.value.size()) throw std::invalid_argument("junk");
      return v;
    } catch (const std::exception&) {
      throw ConfigError(e.line, e.key, "expected an integer, got '" + e.value + "'");
    }
  }

 private:
  const IniSection& sec_;
  std::set<std::string> used_;
};

template <typename Fn>
void wrap_validation(int line, Fn&& fn) {
  try {
    fn();
  } catch (const ValidationError& v) {
    throw ConfigError(line, v.field(), v.what());
  }
}

void read_synth(SectionReader& r, SynthSpec& spec) {
  const IniEntry& kind = r.require("kind");
  wrap_validation(kind.line, [&] { spec.kind = parse_synth_kind(kind.value); });
  spec.num_classes = static_cast<int>(r.integer("num_classes", spec.num_classes));
  spec.dim = static_cast<int>(r.integer("dim", spec.dim));
  spec.num_samples = static_cast<std::size_t>(r.integer("num_samples", 1000));
  spec.separation = r.real("separation", spec.separation);
  spec.seed = r.u64("seed", spec.seed);
  wrap_validation(r.line(), [&] { spec.validate(); });
}

StageSection read_stage(SectionReader& r, StageSection stage, bool has_epochs) {
  TrainConfig& c = stage.config;
  if (has_epochs && r.get("epochs")) {
    c.total_epochs = static_cast<int>(r.integer("epochs", c.total_epochs));
    // An inherited explicit decay list need not fit the new length.
    if (!r.get("decay_epochs")) stage.auto_decay = true;
  }
  c.initial_lr = r.real("lr", c.initial_lr);
  c.decay_factor = r.real("decay_factor", c.decay_factor);
  c.momentum = r.real("momentum", c.momentum);
  c.weight_decay = r.real("weight_decay", c.weight_decay);
  c.batch_size = static_cast<int>(r.integer("batch_size", c.batch_size));
  c.seed = r.u64("seed", c.seed);
  if (const IniEntry* e = r.get("decay_epochs")) {
    if (e->value == "auto") {
      stage.auto_decay = true;
    } else {
      stage.auto_decay = false;
      c.decay_epochs.clear();
      for (auto v : r.int_list(*e)) c.decay_epochs.push_back(static_cast<int>(v));
    }
  }
  if (stage.auto_decay) {
    const auto tail = TrainConfig::with_tail_decay(c.total_epochs, c.batch_size);
    c.decay_epochs = tail.decay_epochs;
  }
  if (has_epochs) wrap_validation(r.line(), [&] { c.validate(); });
  return stage;
}

StageSection default_stage(int epochs, int batch_size) {
  StageSection s;
  s.config = TrainConfig::with_tail_decay(epochs, batch_size);
  return s;
}

}  // namespace

RunManifest parse_manifest(std::string_view text) {
  const IniDocument doc = parse_ini(text);
  RunManifest m;
  m.train.init = default_stage(60, 32);
  m.train.pretrain = default_stage(30, 64);
  m.train.finetune = default_stage(60, 32);

  static const std::set<std::string> kKnown = {"run",        "task",           "stream",
                                               "schedule",   "train.init",     "train.pretrain",
                                               "train.finetune", "eval"};
  for (const auto& sec : doc.sections) {
    if (sec.name.empty()) {
      if (!sec.entries.empty())
        throw ConfigError(sec.entries.front().line, sec.entries.front().key,
                          "keys must appear inside a section");
      continue;
    }
    if (!kKnown.count(sec.name)) throw ConfigError(sec.line, sec.name, "unknown section");
  }
  auto section = [&](const char* name, bool required) -> const IniSection* {
    const IniSection* s = doc.find(name);
    if (!s && required)
      throw ConfigError(0, name, std::string("missing required section [") + name + "]");
    return s;
  };

  if (const auto* sec = section("run", false)) {
    SectionReader r(*sec);
    m.seed = r.u64("seed", m.seed);
    m.output_dir = r.str("output_dir", m.output_dir.string());
    r.reject_unknown();
  }

  {
    SectionReader r(*section("task", true));
    const std::string source = r.str("source", "synth");
    if (source == "synth") {
      m.task.source.kind = SourceKind::kSynth;
      read_synth(r, m.task.source.synth);
    } else if (source == "path") {
      m.task.source.kind = SourceKind::kPath;
      m.task.source.path = r.require("path").value;
    } else {
      throw ConfigError(r.require("source").line, "source", "expected synth or path");
    }
    const auto n = r.integer("n_per_class", 10);
    if (n < 0) throw ConfigError(r.line(), "n_per_class", "must be >= 0 (0 keeps every row)");
    m.task.n_per_class = static_cast<std::size_t>(n);
    m.task.sample_seed = r.u64("sample_seed", 0);
    m.task.normalize = r.boolean("normalize", true);
    r.reject_unknown();
  }

  {
    SectionReader r(*section("stream", true));
    const std::string source = r.str("source", "synth");
    auto read_sizes = [&] {
      const IniEntry& e = r.require("sizes");
      for (auto v : r.int_list(e)) {
        if (v < 1) throw ConfigError(e.line, e.key, "slice sizes must be >= 1");
        m.stream.sizes.push_back(static_cast<std::size_t>(v));
      }
      if (m.stream.sizes.empty()) throw ConfigError(e.line, e.key, "empty");
    };
    m.stream.seed = r.u64("seed", 0);
    if (source == "synth") {
      m.stream.kind = StreamKind::kSynth;
      read_sizes();
      const auto pool = r.integer("pool_size", 0);
      if (pool < 0) throw ConfigError(r.line(), "pool_size", "must be >= 0");
      m.stream.pool_size = static_cast<std::size_t>(pool);
    } else if (source == "pool") {
      m.stream.kind = StreamKind::kPool;
      read_sizes();
      m.stream.pool_path = r.require("path").value;
    } else if (source == "slices") {
      m.stream.kind = StreamKind::kSlices;
      for (const auto& p : split_list(r.require("paths").value)) m.stream.slice_paths.push_back(p);
    } else {
      throw ConfigError(r.require("source").line, "source", "expected synth, pool or slices");
    }
    r.reject_unknown();
  }
  const std::size_t slices = m.stream.slice_count();

  {
    const IniSection& sec = *section("schedule", true);
    SectionReader r(sec);
    const IniEntry* preset = r.get("preset");
    const IniEntry* specs = r.get("specs");
    if ((preset == nullptr) == (specs == nullptr))
      throw ConfigError(sec.line, "schedule", "give exactly one of preset or specs");
    if (preset) {
      wrap_validation(preset->line, [&] { m.schedule.specs = schedule_preset(preset->value, slices); });
    } else {
      m.schedule.specs = split_list(specs->value);
    }
    // Dimensions are bound later; check the names now.
    for (const auto& name : m.schedule.specs)
      wrap_validation(preset ? preset->line : specs->line, [&] { parse_hypothesis(name, 1, 2); });
    r.reject_unknown();
    if (m.schedule.specs.size() != slices + 1)
      throw ConfigError(preset ? preset->line : specs->line, "schedule",
                        fmt::format("length mismatch: {} slices need {} schedule entries, got {}",
                                    slices, slices + 1, m.schedule.specs.size()));
  }

  if (const auto* sec = section("train.init", false)) {
    SectionReader r(*sec);
    m.train.init = read_stage(r, m.train.init, true);
    r.reject_unknown();
  }
  // Finetuning defaults to the init schedule unless given.
  m.train.finetune = m.train.init;
  if (const auto* sec = section("train.pretrain", false)) {
    SectionReader r(*sec);
    if (const IniEntry* e = r.get("epochs")) {
      for (auto v : r.int_list(*e)) m.train.pretrain_epochs.push_back(static_cast<int>(v));
      if (m.train.pretrain_epochs.size() == 1 && slices > 1)
        m.train.pretrain_epochs.assign(slices, m.train.pretrain_epochs.front());
      if (m.train.pretrain_epochs.size() != slices)
        throw ConfigError(e->line, e->key,
                          fmt::format("length mismatch: {} epoch counts for {} slices",
                                      m.train.pretrain_epochs.size(), slices));
    }
    if (const IniEntry* e = r.get("decay_budget")) {
      if (e->value == "auto") {
        for (std::size_t t = 0; t < slices; ++t)
          m.train.pretrain_decay_budget.push_back(reference_decay_budget(t));
      } else {
        for (const auto& item : split_list(e->value))
          m.train.pretrain_decay_budget.push_back(SectionReader::to_real({e->key, item, e->line}));
        if (m.train.pretrain_decay_budget.size() == 1 && slices > 1)
          m.train.pretrain_decay_budget.assign(slices, m.train.pretrain_decay_budget.front());
      }
      if (m.train.pretrain_decay_budget.size() != slices)
        throw ConfigError(e->line, e->key,
                          fmt::format("length mismatch: {} budgets for {} slices",
                                      m.train.pretrain_decay_budget.size(), slices));
      for (double b : m.train.pretrain_decay_budget)
        if (!(b >= 0.0) || !std::isfinite(b))
          throw ConfigError(e->line, e->key, "budgets must be finite and >= 0");
    }
    m.train.pretrain = read_stage(r, m.train.pretrain, false);
    r.reject_unknown();
  }
  if (m.train.pretrain_epochs.empty()) {
    // 30/20/15 taper for the first three slices, 15 afterwards.
    for (std::size_t t = 0; t < slices; ++t)
      m.train.pretrain_epochs.push_back(t == 0 ? 30 : t == 1 ? 20 : 15);
  }
  if (const auto* sec = section("train.finetune", false)) {
    SectionReader r(*sec);
    m.train.finetune = read_stage(r, m.train.finetune, true);
    r.reject_unknown();
  }
  if (m.task.source.kind == SourceKind::kSynth) {
    const auto* sec = doc.find("schedule");
    wrap_validation(sec ? sec->line : 0, [&] {
      m.resolve_schedule(m.task.source.synth.dim, m.task.source.synth.num_classes).validate();
    });
  }
  // Surface invalid per-slice configs at parse time.
  wrap_validation(doc.find("train.pretrain") ? doc.find("train.pretrain")->line : 0,
                  [&] { for (const auto& c : m.stream_configs({}).pretrain) c.validate(); });

  {
    const IniSection& sec = *section("eval", true);
    SectionReader r(sec);
    const std::string source = r.str("source", "synth");
    if (source == "synth") {
      if (m.task.source.kind != SourceKind::kSynth)
        throw ConfigError(sec.line, "source", "synth eval requires a synth task");
      m.eval.source.kind = SourceKind::kSynth;
      m.eval.source.synth = m.task.source.synth;
      m.eval.source.synth.num_samples = static_cast<std::size_t>(r.integer("num_samples", 2000));
      m.eval.source.synth.seed = r.u64("seed", m.task.source.synth.seed + 1);
      wrap_validation(sec.line, [&] { m.eval.source.synth.validate(); });
    } else if (source == "path") {
      m.eval.source.kind = SourceKind::kPath;
      m.eval.source.path = r.require("path").value;
    } else {
      throw ConfigError(sec.line, "source", "expected synth or path");
    }
    r.reject_unknown();
  }
  return m;
}

RunManifest load_manifest(const std::filesystem::path& path) {
  return parse_manifest(detail::read_text_file(path));
}

StreamConfigs RunManifest::stream_configs(const std::vector<std::size_t>& slice_sizes) const {
  StreamConfigs c;
  c.init = train.init.config;
  c.finetune = train.finetune.config;
  for (std::size_t t = 0; t < train.pretrain_epochs.size(); ++t) {
    const int epochs = train.pretrain_epochs[t];
    TrainConfig p = train.pretrain.config;
    p.total_epochs = epochs;
    if (train.pretrain.auto_decay)
      p.decay_epochs = TrainConfig::with_tail_decay(epochs, p.batch_size).decay_epochs;
    if (t < train.pretrain_decay_budget.size() && t < slice_sizes.size() && epochs > 0)
      p.match_decay_budget(train.pretrain_decay_budget[t], slice_sizes[t]);
    c.pretrain.push_back(p);
  }
  return c;
}

CapacitySchedule RunManifest::resolve_schedule(int input_dim, int num_classes) const {
  return schedule_from_names(schedule.specs, input_dim, num_classes);
}

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? ", " : "") + items[i];
  return out;
}

template <typename T>
std::string join_numbers(const std::vector<T>& items) {
  std::vector<std::string> s;
  for (const auto& v : items) s.push_back(fmt::format("{}", v));
  return join(s);
}

void write_stage(std::string& out, const char* name, const StageSection& st, bool with_epochs) {
  const auto& c = st.config;
  out += fmt::format("\n[{}]\n", name);
  if (with_epochs) out += fmt::format("epochs = {}\n", c.total_epochs);
  out += fmt::format("lr = {}\n", c.initial_lr);
  out += fmt::format("decay_factor = {}\n", c.decay_factor);
  out += st.auto_decay ? std::string("decay_epochs = auto\n")
                       : fmt::format("decay_epochs = {}\n", join_numbers(c.decay_epochs));
  out += fmt::format("momentum = {}\n", c.momentum);
  out += fmt::format("weight_decay = {}\n", c.weight_decay);
  out += fmt::format("batch_size = {}\n", c.batch_size);
  out += fmt::format("seed = {}\n", c.seed);
}

}  // namespace

std::string serialize_manifest(const RunManifest& m, bool include_output_dir) {
  std::string out = "[run]\n";
  out += fmt::format("seed = {}\n", m.seed);
  if (include_output_dir) out += fmt::format("output_dir = {}\n", m.output_dir.string());

  out += "\n[task]\n";
  if (m.task.source.kind == SourceKind::kSynth) {
    const auto& s = m.task.source.synth;
    out += "source = synth\n";
    out += fmt::format("kind = {}\nnum_classes = {}\ndim = {}\nnum_samples = {}\n", to_string(s.kind),
                       s.num_classes, s.dim, s.num_samples);
    out += fmt::format("separation = {}\nseed = {}\n", s.separation, s.seed);
  } else {
    out += fmt::format("source = path\npath = {}\n", m.task.source.path.string());
  }
  out += fmt::format("n_per_class = {}\nsample_seed = {}\nnormalize = {}\n", m.task.n_per_class,
                     m.task.sample_seed, m.task.normalize ? "true" : "false");

  out += "\n[stream]\n";
  switch (m.stream.kind) {
    case StreamKind::kSynth:
      out += fmt::format("source = synth\nsizes = {}\npool_size = {}\n",
                         join_numbers(m.stream.sizes), m.stream.pool_size);
      break;
    case StreamKind::kPool:
      out += fmt::format("source = pool\npath = {}\nsizes = {}\n", m.stream.pool_path.string(),
                         join_numbers(m.stream.sizes));
      break;
    case StreamKind::kSlices: {
      std::vector<std::string> paths;
      for (const auto& p : m.stream.slice_paths) paths.push_back(p.string());
      out += fmt::format("source = slices\npaths = {}\n", join(paths));
      break;
    }
  }
  out += fmt::format("seed = {}\n", m.stream.seed);

  out += fmt::format("\n[schedule]\nspecs = {}\n", join(m.schedule.specs));

  write_stage(out, "train.init", m.train.init, true);
  out += fmt::format("\n[train.pretrain]\nepochs = {}\n", join_numbers(m.train.pretrain_epochs));
  {
    std::string stage;
    write_stage(stage, "train.pretrain", m.train.pretrain, false);
    out += stage.substr(stage.find(']') + 2);  // drop the repeated header
    if (!m.train.pretrain_decay_budget.empty())
      out += fmt::format("decay_budget = {}\n", join_numbers(m.train.pretrain_decay_budget));
  }
  write_stage(out, "train.finetune", m.train.finetune, true);

  out += "\n[eval]\n";
  if (m.eval.source.kind == SourceKind::kSynth) {
    out += fmt::format("source = synth\nnum_samples = {}\nseed = {}\n",
                       m.eval.source.synth.num_samples, m.eval.source.synth.seed);
  } else {
    out += fmt::format("source = path\npath = {}\n", m.eval.source.path.string());
  }
  return out;
}

std::uint64_t manifest_fingerprint(const RunManifest& m) {
  Fnv1a h;
  h.update(serialize_manifest(m, false));
  return h.digest();
}

}  // namespace sst
