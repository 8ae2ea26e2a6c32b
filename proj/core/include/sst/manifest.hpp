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
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sst/dataset.hpp"
#include "sst/model.hpp"
#include "sst/optim.hpp"
#include "sst/selftrain.hpp"

namespace sst {

enum class SourceKind { kSynth, kPath };

// Labeled data source: a synthetic mixture or a dataset file.
struct LabeledSource {
  SourceKind kind = SourceKind::kSynth;
  SynthSpec synth;
  std::filesystem::path path;
};

struct TaskSection {
  LabeledSource source;
  std::size_t n_per_class = 10;
  std::uint64_t sample_seed = 0;
  bool normalize = true;
};

enum class StreamKind {
  kSynth,   // a pool drawn from the task mixture with its own seed
  kPool,    // an unlabeled (or labeled, labels ignored) pool file
  kSlices,  // one file per slice, used as-is
};

struct StreamSection {
  StreamKind kind = StreamKind::kSynth;
  std::vector<std::size_t> sizes;          // kSynth, kPool
  std::size_t pool_size = 0;               // kSynth; 0 means sum(sizes)
  std::uint64_t seed = 0;                  // pool synthesis and slicing
  std::filesystem::path pool_path;         // kPool
  std::vector<std::filesystem::path> slice_paths;  // kSlices

  std::size_t slice_count() const noexcept;
};

struct ScheduleSection {
  // Names accepted by parse_hypothesis; entry 0 is the init spec.
  std::vector<std::string> specs;
};

struct StageSection {
  TrainConfig config;
  bool auto_decay = true;  // decay at ceil(5/6 * epochs)
};

struct TrainSection {
  StageSection init;
  std::vector<int> pretrain_epochs;  // one per slice
  StageSection pretrain;             // shared hyper-parameters
  // Per-slice sum(lr * wd) targets; when set, each slice's weight_decay is
  // derived from its size instead of taken from `pretrain`.
  std::vector<double> pretrain_decay_budget;
  StageSection finetune;
};

struct EvalSection {
  LabeledSource source;  // for kSynth only num_samples and seed are read
};

struct RunManifest {
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "sst_run";
  TaskSection task;
  StreamSection stream;
  ScheduleSection schedule;
  TrainSection train;
  EvalSection eval;

  StreamConfigs stream_configs(const std::vector<std::size_t>& slice_sizes) const;
  CapacitySchedule resolve_schedule(int input_dim, int num_classes) const;
};

// Sections: [run] [task] [stream] [schedule] [train.init] [train.pretrain]
// [train.finetune] [eval]. [task], [stream], [schedule] and [eval] are
// required; everything else has defaults. Unknown sections or keys are
// rejected with the line number.
RunManifest parse_manifest(std::string_view text);
RunManifest load_manifest(const std::filesystem::path& path);

// Canonical text: fixed section and key order, every default written out.
std::string serialize_manifest(const RunManifest& manifest, bool include_output_dir = true);

// Hash of the canonical text without output_dir.
std::uint64_t manifest_fingerprint(const RunManifest& manifest);

std::string hex64(std::uint64_t v);

// Named schedule presets: "default" (linear, mlp32, mlp128, mlp256x128) and
// "fixed_linear" (linear repeated for `iterations` + 1 entries).
std::vector<std::string> schedule_preset(std::string_view name, std::size_t iterations);

}  // namespace sst
