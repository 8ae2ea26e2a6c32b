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
#include <optional>
#include <string>

#include "sst/dataset.hpp"
#include "sst/manifest.hpp"
#include "sst/selftrain.hpp"

namespace sst {

// The manifest's data, built and normalized (statistics from S only).
struct MaterializedRun {
  LabeledDataset s;
  std::vector<UnlabeledSlice> slices;
  LabeledDataset eval;
  CapacitySchedule schedule;
  StreamConfigs configs;
  std::optional<NormalizationStats> normalization;
  std::uint64_t manifest_fingerprint = 0;
};

// Relative paths in the manifest resolve against base_dir.
MaterializedRun materialize(const RunManifest& manifest, const std::filesystem::path& base_dir);

enum class RunMode { kStream, kNoStream };

struct RunOptions {
  RunMode mode = RunMode::kStream;
  // Continue from the last completed iteration recorded in output_dir.
  bool resume = false;
  std::optional<int> stop_after;
  // Off: wall_seconds are written as 0 so reports are byte-reproducible.
  bool record_wall_time = false;
  int threads = 1;
  std::filesystem::path base_dir = ".";
};

struct RunOutcome {
  StreamResult result;
  std::filesystem::path output_dir;
  int resumed_after = -1;  // last iteration restored from disk, -1 if fresh
  bool complete = false;
};

// Artifacts written under the run directory (output_dir for streaming,
// output_dir/no_stream for the single-iteration baseline):
//   manifest.cfg            canonical manifest
//   normalization.sstd      2 x d unlabeled container (mean row, std row)
//   checkpoint_t{t}.sstc    F after iteration t
//   plabels_t{t}.sstl       pseudo-labels of slice t
//   run_state.json          full-precision records, for resume
//   report.csv              iteration table with a fingerprint comment line
// A lock file guards the directory for the duration of the call.
RunOutcome run_manifest(const RunManifest& manifest, const RunOptions& options);

std::filesystem::path checkpoint_path(const std::filesystem::path& dir, int t);
std::filesystem::path pseudo_label_path(const std::filesystem::path& dir, int t);

// report.csv contents: "# manifest=<hex> seed=<n> run=<name>" then the table.
std::string format_report_file(const RunReport& report);

NormalizationStats load_normalization(const std::filesystem::path& path);
void save_normalization(const std::filesystem::path& path, const NormalizationStats& stats);

}  // namespace sst
