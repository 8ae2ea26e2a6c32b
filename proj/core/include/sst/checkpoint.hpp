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
#include <vector>

#include "sst/model.hpp"
#include "sst/selftrain.hpp"

namespace sst {

// Checkpoint container, little-endian:
//   "SSTCKPT1" | u32 version | u32 kind (0 linear, 1 mlp) | u32 input_dim |
//   u32 num_classes | u32 capacity_index | u32 n_hidden | n_hidden * u32 |
//   u64 init_seed | i32 iteration | u64 manifest_fingerprint |
//   u64 parameter_count | parameters as f64 (per layer: weight row-major
//   fan_in x fan_out, then bias)
inline constexpr char kCheckpointMagic[] = "SSTCKPT1";
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  std::uint32_t version = kCheckpointVersion;
  Model model;
  int iteration = 0;
  std::uint64_t manifest_fingerprint = 0;
};

std::vector<char> encode_checkpoint(const Model& model, int iteration,
                                    std::uint64_t manifest_fingerprint);
Checkpoint decode_checkpoint(const std::vector<char>& bytes, const std::string& source);

void save_checkpoint(const std::filesystem::path& path, const Model& model, int iteration,
                     std::uint64_t manifest_fingerprint);
// With `expected_fingerprint`, a checkpoint from a different manifest is a
// kFingerprintMismatch error.
Checkpoint load_checkpoint(const std::filesystem::path& path,
                           std::optional<std::uint64_t> expected_fingerprint = std::nullopt);

// Pseudo-label cache, little-endian:
//   "SSTPLBL1" | u32 version | u64 M | M * i32 labels | u64 labeler_fingerprint
inline constexpr char kPseudoLabelMagic[] = "SSTPLBL1";
inline constexpr std::uint32_t kPseudoLabelVersion = 1;

struct PseudoLabelCache {
  Labels labels;
  std::uint64_t labeler_fingerprint = 0;
};

std::vector<char> encode_pseudo_labels(const PseudoLabelCache& cache);
PseudoLabelCache decode_pseudo_labels(const std::vector<char>& bytes, const std::string& source);
void save_pseudo_labels(const std::filesystem::path& path, const PseudoLabeledDataset& pseudo);
void save_pseudo_labels(const std::filesystem::path& path, const PseudoLabelCache& cache);
PseudoLabelCache load_pseudo_labels(const std::filesystem::path& path);

}  // namespace sst
