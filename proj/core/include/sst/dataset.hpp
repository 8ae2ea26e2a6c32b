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
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "sst/types.hpp"

namespace sst {

// The small labeled set S.
struct LabeledDataset {
  Matrix features;
  Labels labels;
  int num_classes = 0;
  std::string name;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(features.cols()); }

  // Throws ValidationError if rows/labels disagree, a label is out of
  // [0, C), C < 2, or a feature is non-finite.
  void validate() const;
  std::vector<std::size_t> class_counts() const;

  // Compares features, labels and class count. The name is not part of
  // the on-disk format and is ignored.
  bool same_content(const LabeledDataset& other) const;
};

// One slice U_t of the unlabeled stream.
struct UnlabeledSlice {
  Matrix features;
  int slice_index = 1;
  std::string source_id;

  std::size_t size() const noexcept { return static_cast<std::size_t>(features.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(features.cols()); }
  void validate() const;
};

enum class SynthKind { kGaussianMixture, kXor, kRings };

const char* to_string(SynthKind kind) noexcept;
SynthKind parse_synth_kind(std::string_view name);

// Synthetic task description. Noise is unit-variance isotropic Gaussian.
//
//   gaussian_mixture  C == 2:  means at +-separation/2 on axis 0
//                     d >= C:  mean_c = separation/sqrt(2) * e_c
//                     else:    means on a circle in axes 0,1 with adjacent
//                              chord length = separation
//   xor               quadrant centres (+-separation/2, +-separation/2) in
//                     axes 0,1; label = sign(x0) != sign(x1) of the centre
//   rings             ring c has radius (c + 1) * separation in axes 0,1,
//                     uniform angle; remaining axes are pure noise
//
// In the first two gaussian layouts every pair of class means is exactly
// `separation` apart. Rows are assigned to classes round-robin
// and then shuffled, so class counts differ by at most one.
struct SynthSpec {
  SynthKind kind = SynthKind::kGaussianMixture;
  int num_classes = 2;
  int dim = 2;
  std::size_t num_samples = 100;
  double separation = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

LabeledDataset synthesize(const SynthSpec& spec);

// Class means of a gaussian_mixture spec, one row per class.
Matrix gaussian_mixture_means(const SynthSpec& spec);

// Exactly n_per_class rows per class without replacement. Selected rows
// keep their original relative order.
LabeledDataset few_shot_sample(const LabeledDataset& ds, std::size_t n_per_class,
                               std::uint64_t seed);

// Disjoint slices of the pool rows, slice t (1-based) has sizes[t-1] rows.
std::vector<UnlabeledSlice> make_stream(const Matrix& pool, std::span<const std::size_t> sizes,
                                        std::uint64_t seed,
                                        const std::string& source_id = "pool");

// Row indices of the pool each make_stream slice was drawn from.
std::vector<std::vector<std::size_t>> stream_row_indices(std::size_t pool_rows,
                                                         std::span<const std::size_t> sizes,
                                                         std::uint64_t seed);

struct NormalizationStats {
  Vector mean;
  Vector std;

  static constexpr double kStdFloor = 1e-8;
};

// Population statistics (divide by N) of S. Only S is ever read.
NormalizationStats fit_normalization(const LabeledDataset& s);
Matrix apply_normalization(const NormalizationStats& stats, const Matrix& features);

// Binary container, little-endian:
//   "SSTDATA1" | u32 version=1 | u32 flags (bit0 = has labels) | u64 N |
//   u64 d | u32 C (0 if unlabeled) | N*d f64 row-major | [N i32 labels]
inline constexpr char kDatasetMagic[] = "SSTDATA1";
inline constexpr std::uint32_t kDatasetVersion = 1;

using AnyDataset = std::variant<LabeledDataset, UnlabeledSlice>;

void save_dataset(const std::filesystem::path& path, const LabeledDataset& ds);
void save_dataset(const std::filesystem::path& path, const UnlabeledSlice& slice);
AnyDataset load_dataset(const std::filesystem::path& path);
LabeledDataset load_labeled(const std::filesystem::path& path);
// A labeled container is accepted here; its labels are dropped.
UnlabeledSlice load_unlabeled(const std::filesystem::path& path);

std::vector<char> encode_dataset(const LabeledDataset& ds);
std::vector<char> encode_dataset(const UnlabeledSlice& slice);
AnyDataset decode_dataset(const std::vector<char>& bytes, const std::string& source);

// CSV with header `f0,...,f{d-1}[,label]`. For labeled input the class
// count is max(label) + 1 unless num_classes > 0 is given.
AnyDataset import_csv(std::istream& in, const std::string& source, int num_classes = 0);
AnyDataset import_csv(const std::filesystem::path& path, int num_classes = 0);

}  // namespace sst
