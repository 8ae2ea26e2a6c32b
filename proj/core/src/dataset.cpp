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

#include "sst/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "binary_io.hpp"
#include "sst/error.hpp"
#include "sst/ini.hpp"
#include "sst/rng.hpp"

namespace sst {

namespace {

void check_finite(const Matrix& m, const char* field) {
  if (!m.allFinite()) throw ValidationError(field, "contains a non-finite value");
}

// Round-robin class assignment, shuffled: counts differ by at most one.
Labels balanced_labels(std::size_t n, int num_classes, SplitMix64& rng) {
  Labels labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<std::int32_t>(i % num_classes);
  for (std::size_t i = n; i > 1; --i) std::swap(labels[i - 1], labels[rng.below(i)]);
  return labels;
}

}  // namespace

void LabeledDataset::validate() const {
  if (num_classes < 2) throw ValidationError("num_classes", "must be >= 2");
  if (static_cast<std::size_t>(features.rows()) != labels.size())
    throw ShapeError("labels length vs feature rows", features.rows(),
                     static_cast<std::int64_t>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= num_classes)
      throw ValidationError("labels", "row " + std::to_string(i) + " has label " +
                                          std::to_string(labels[i]) + " outside [0, " +
                                          std::to_string(num_classes) + ")");
  }
  check_finite(features, "features");
}

std::vector<std::size_t> LabeledDataset::class_counts() const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(std::max(num_classes, 0)), 0);
  for (auto l : labels) ++counts.at(static_cast<std::size_t>(l));
  return counts;
}

bool LabeledDataset::same_content(const LabeledDataset& other) const {
  return num_classes == other.num_classes && labels == other.labels &&
         features.rows() == other.features.rows() &&
         features.cols() == other.features.cols() &&
         std::equal(features.data(), features.data() + features.size(), other.features.data(),
                    [](double a, double b) {
                      return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
                    });
}

void UnlabeledSlice::validate() const {
  if (features.rows() < 1) throw ValidationError("features", "slice must have at least one row");
  if (slice_index < 1) throw ValidationError("slice_index", "must be >= 1");
  check_finite(features, "features");
}

const char* to_string(SynthKind kind) noexcept {
  switch (kind) {
    case SynthKind::kGaussianMixture: return "gaussian_mixture";
    case SynthKind::kXor: return "xor";
    case SynthKind::kRings: return "rings";
  }
  return "unknown";
}

SynthKind parse_synth_kind(std::string_view name) {
  if (name == "gaussian_mixture") return SynthKind::kGaussianMixture;
  if (name == "xor") return SynthKind::kXor;
  if (name == "rings") return SynthKind::kRings;
  throw ValidationError("kind", "unknown synth kind '" + std::string(name) + "'");
}

void SynthSpec::validate() const {
  if (num_classes < 2) throw ValidationError("num_classes", "must be >= 2");
  if (dim < 1) throw ValidationError("dim", "must be >= 1");
  if (num_samples < 1) throw ValidationError("num_samples", "must be >= 1");
  if (!(separation >= 0.0) || !std::isfinite(separation))
    throw ValidationError("separation", "must be finite and >= 0");
  if (kind == SynthKind::kXor) {
    if (num_classes != 2) throw ValidationError("num_classes", "xor requires num_classes = 2");
    if (dim < 2) throw ValidationError("dim", "xor requires dim >= 2");
  }
  if (kind == SynthKind::kRings && dim < 2)
    throw ValidationError("dim", "rings requires dim >= 2");
  if (kind == SynthKind::kGaussianMixture && num_classes > 2 && dim < 2 )
    throw ValidationError("dim", "gaussian_mixture with more than 2 classes requires dim >= 2");
}

Matrix gaussian_mixture_means(const SynthSpec& spec) {
  const int c = spec.num_classes;
  Matrix means = Matrix::Zero(c, spec.dim);
  if (c == 2) {
    means(0, 0) = -spec.separation / 2.0;
    means(1, 0) = spec.separation / 2.0;
  } else if (spec.dim >= c) {
    for (int k = 0; k < c; ++k) means(k, k) = spec.separation / std::numbers::sqrt2;
  } else {
    const double radius = spec.separation / (2.0 * std::sin(std::numbers::pi / c));
    for (int k = 0; k < c; ++k) {
      const double angle = 2.0 * std::numbers::pi * k / c;
      means(k, 0) = radius * std::cos(angle);
      means(k, 1) = radius * std::sin(angle);
    }
  }
  return means;
}

LabeledDataset synthesize(const SynthSpec& spec) {
  spec.validate();
  SplitMix64 rng(derive_seed(spec.seed, "synth"));
  const auto n = spec.num_samples;

  LabeledDataset ds;
  ds.num_classes = spec.num_classes;
  ds.name = std::string(to_string(spec.kind)) + "-" + std::to_string(spec.seed);
  ds.features.resize(static_cast<Eigen::Index>(n), spec.dim);

  switch (spec.kind) {
    case SynthKind::kGaussianMixture: {
      ds.labels = balanced_labels(n, spec.num_classes, rng);
      const Matrix means = gaussian_mixture_means(spec);
      for (std::size_t i = 0; i < n; ++i)
        for (int j = 0; j < spec.dim; ++j)
          ds.features(i, j) = means(ds.labels[i], j) + rng.normal();
      break;
    }
    case SynthKind::kXor: {
      // Quadrants 0..3 round-robin; quadrant q has centre signs (s0, s1).
      const Labels quadrant = balanced_labels(n, 4, rng);
      ds.labels.resize(n);
      const double half = spec.separation / 2.0;
      for (std::size_t i = 0; i < n; ++i) {
        const int q = quadrant[i];
        const double s0 = (q & 1) ? 1.0 : -1.0;
        const double s1 = (q & 2) ? 1.0 : -1.0;
        ds.labels[i] = (s0 > 0) != (s1 > 0) ? 1 : 0;
        ds.features(i, 0) = s0 * half + rng.normal();
        ds.features(i, 1) = s1 * half + rng.normal();
        for (int j = 2; j < spec.dim; ++j) ds.features(i, j) = rng.normal();
      }
      break;
    }
    case SynthKind::kRings: {
      ds.labels = balanced_labels(n, spec.num_classes, rng);
      for (std::size_t i = 0; i < n; ++i) {
        const double radius = (ds.labels[i] + 1) * spec.separation;
        const double angle = 2.0 * std::numbers::pi * rng.uniform();
        ds.features(i, 0) = radius * std::cos(angle) + rng.normal();
        ds.features(i, 1) = radius * std::sin(angle) + rng.normal();
        for (int j = 2; j < spec.dim; ++j) ds.features(i, j) = rng.normal();
      }
      break;
    }
  }
  return ds;
}

LabeledDataset few_shot_sample(const LabeledDataset& ds, std::size_t n_per_class,
                               std::uint64_t seed) {
  ds.validate();
  std::vector<std::vector<std::size_t>> by_class(ds.num_classes);
  for (std::size_t i = 0; i < ds.size(); ++i) by_class[ds.labels[i]].push_back(i);

  SplitMix64 rng(derive_seed(seed, "few_shot"));
  std::vector<std::size_t> chosen;
  chosen.reserve(n_per_class * ds.num_classes);
  for (int c = 0; c < ds.num_classes; ++c) {
    auto& rows = by_class[c];
    if (rows.size() < n_per_class)
      throw ValidationError("class " + std::to_string(c),
                            "has " + std::to_string(rows.size()) + " examples, need " +
                                std::to_string(n_per_class));
    // Partial Fisher-Yates: the first n_per_class positions are the sample.
    for (std::size_t k = 0; k < n_per_class; ++k) {
      const std::size_t j = k + rng.below(rows.size() - k);
      std::swap(rows[k], rows[j]);
    }
    chosen.insert(chosen.end(), rows.begin(), rows.begin() + n_per_class);
  }
  std::sort(chosen.begin(), chosen.end());

  LabeledDataset out;
  out.num_classes = ds.num_classes;
  out.name = ds.name + "-fewshot" + std::to_string(n_per_class);
  out.features.resize(static_cast<Eigen::Index>(chosen.size()), ds.features.cols());
  out.labels.resize(chosen.size());
  for (std::size_t r = 0; r < chosen.size(); ++r) {
    out.features.row(r) = ds.features.row(chosen[r]);
    out.labels[r] = ds.labels[chosen[r]];
  }
  return out;
}

std::vector<std::vector<std::size_t>> stream_row_indices(std::size_t pool_rows,
                                                         std::span<const std::size_t> sizes,
                                                         std::uint64_t seed) {
  std::size_t total = 0;
  for (std::size_t t = 0; t < sizes.size(); ++t) {
    if (sizes[t] < 1)
      throw ValidationError("sizes[" + std::to_string(t) + "]", "slice sizes must be >= 1");
    total += sizes[t];
  }
  if (total > pool_rows) throw CapacityError(total, pool_rows);

  SplitMix64 rng(derive_seed(seed, "stream"));
  const auto order = permutation(pool_rows, rng);
  std::vector<std::vector<std::size_t>> out;
  std::size_t offset = 0;
  for (auto size : sizes) {
    out.emplace_back(order.begin() + offset, order.begin() + offset + size);
    offset += size;
  }
  return out;
}

std::vector<UnlabeledSlice> make_stream(const Matrix& pool, std::span<const std::size_t> sizes,
                                        std::uint64_t seed, const std::string& source_id) {
  const auto indices = stream_row_indices(static_cast<std::size_t>(pool.rows()), sizes, seed);
  std::vector<UnlabeledSlice> slices;
  slices.reserve(indices.size());
  for (std::size_t t = 0; t < indices.size(); ++t) {
    UnlabeledSlice s;
    s.slice_index = static_cast<int>(t + 1);
    s.source_id = source_id;
    s.features.resize(static_cast<Eigen::Index>(indices[t].size()), pool.cols());
    for (std::size_t r = 0; r < indices[t].size(); ++r) s.features.row(r) = pool.row(indices[t][r]);
    slices.push_back(std::move(s));
  }
  return slices;
}

NormalizationStats fit_normalization(const LabeledDataset& s) {
  if (s.features.rows() == 0) throw ValidationError("S", "cannot fit normalization on empty data");
  const auto n = static_cast<double>(s.features.rows());
  NormalizationStats stats;
  stats.mean = s.features.colwise().sum().transpose() / n;
  stats.std.resize(s.features.cols());
  for (Eigen::Index j = 0; j < s.features.cols(); ++j) {
    const double var = (s.features.col(j).array() - stats.mean(j)).square().sum() / n;
    stats.std(j) = std::max(std::sqrt(var), NormalizationStats::kStdFloor);
  }
  return stats;
}

Matrix apply_normalization(const NormalizationStats& stats, const Matrix& features) {
  if (features.cols() != stats.mean.size())
    throw ShapeError("normalization feature dim", stats.mean.size(), features.cols());
  Matrix out = features;
  out.rowwise() -= stats.mean.transpose();
  out.array().rowwise() /= stats.std.transpose().array();
  return out;
}

namespace {

void encode_header(detail::ByteWriter& w, bool labeled, const Matrix& x, int num_classes) {
  w.bytes(std::string_view(kDatasetMagic, 8));
  w.u32(kDatasetVersion);
  w.u32(labeled ? 1u : 0u);
  w.u64(static_cast<std::uint64_t>(x.rows()));
  w.u64(static_cast<std::uint64_t>(x.cols()));
  w.u32(labeled ? static_cast<std::uint32_t>(num_classes) : 0u);
  for (Eigen::Index i = 0; i < x.size(); ++i) w.f64(x.data()[i]);
}

}  // namespace

std::vector<char> encode_dataset(const LabeledDataset& ds) {
  ds.validate();
  detail::ByteWriter w;
  encode_header(w, true, ds.features, ds.num_classes);
  for (auto l : ds.labels) w.i32(l);
  return w.data();
}

std::vector<char> encode_dataset(const UnlabeledSlice& slice) {
  detail::ByteWriter w;
  encode_header(w, false, slice.features, 0);
  return w.data();
}

AnyDataset decode_dataset(const std::vector<char>& bytes, const std::string& source) {
  detail::ByteReader r(bytes, source);
  r.expect_magic(std::string_view(kDatasetMagic, 8));
  const auto version = r.u32("version");
  if (version != kDatasetVersion)
    throw ParseError(ParseErrorKind::kUnsupportedVersion,
                     source + ": dataset version " + std::to_string(version));
  const auto flags = r.u32("flags");
  if (flags & ~1u) throw ParseError(ParseErrorKind::kMalformed, source + ": unknown flag bits");
  const bool labeled = flags & 1u;
  const auto n = r.u64("N");
  const auto d = r.u64("d");
  const auto c = r.u32("C");
  if (!labeled && c != 0)
    throw ParseError(ParseErrorKind::kMalformed, source + ": unlabeled container with C != 0");
  if (labeled && c < 2)
    throw ParseError(ParseErrorKind::kMalformed, source + ": labeled container with C < 2");

  constexpr std::uint64_t kMaxElems = std::uint64_t{1} << 40;
  if (d != 0 && n > kMaxElems / d)
    throw ParseError(ParseErrorKind::kMalformed, source + ": implausible shape");
  const std::uint64_t payload = n * d * 8 + (labeled ? n * 4 : 0);
  r.need(payload, "payload");

  Matrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = r.f64("feature");
  if (!x.allFinite())
    throw ParseError(ParseErrorKind::kMalformed, source + ": non-finite feature value");

  if (!labeled) {
    r.expect_end();
    UnlabeledSlice s;
    s.features = std::move(x);
    s.source_id = source;
    return s;
  }
  LabeledDataset ds;
  ds.num_classes = static_cast<int>(c);
  ds.labels.resize(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto l = r.i32("label");
    if (l < 0 || l >= static_cast<std::int32_t>(c))
      throw ParseError(ParseErrorKind::kLabelOutOfRange,
                       source + ": row " + std::to_string(i) + " label " + std::to_string(l));
    ds.labels[i] = l;
  }
  r.expect_end();
  ds.features = std::move(x);
  ds.name = std::filesystem::path(source).stem().string();
  return ds;
}

void save_dataset(const std::filesystem::path& path, const LabeledDataset& ds) {
  detail::write_file(path, encode_dataset(ds));
}

void save_dataset(const std::filesystem::path& path, const UnlabeledSlice& slice) {
  detail::write_file(path, encode_dataset(slice));
}

AnyDataset load_dataset(const std::filesystem::path& path) {
  return decode_dataset(detail::read_file(path), path.string());
}

LabeledDataset load_labeled(const std::filesystem::path& path) {
  auto any = load_dataset(path);
  if (auto* ds = std::get_if<LabeledDataset>(&any)) return std::move(*ds);
  throw ValidationError(path.string(), "expected a labeled dataset");
}

UnlabeledSlice load_unlabeled(const std::filesystem::path& path) {
  auto any = load_dataset(path);
  if (auto* s = std::get_if<UnlabeledSlice>(&any)) return std::move(*s);
  UnlabeledSlice s;
  s.features = std::move(std::get<LabeledDataset>(any).features);
  s.source_id = path.string();
  return s;
}

AnyDataset import_csv(std::istream& in, const std::string& source, int num_classes) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(ParseErrorKind::kMalformed, source + ": empty csv");
  const auto header = split_list(line);
  bool labeled = !header.empty() && header.back() == "label";
  const std::size_t d = header.size() - (labeled ? 1 : 0);
  for (std::size_t j = 0; j < d; ++j)
    if (header[j] != "f" + std::to_string(j))
      throw ParseError(ParseErrorKind::kMalformed,
                       source + ": header column " + std::to_string(j) + " is '" + header[j] +
                           "', expected f" + std::to_string(j));

  std::vector<double> values;
  Labels labels;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const auto cells = split_list(line);
    if (cells.size() != header.size())
      throw ParseError(ParseErrorKind::kMalformed,
                       source + ": row " + std::to_string(row) + " has " +
                           std::to_string(cells.size()) + " cells");
    for (std::size_t j = 0; j < d; ++j) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(cells[j], &used));
        if (used != cells[j].size()) throw std::invalid_argument("junk");
      } catch (const std::exception&) {
        throw ParseError(ParseErrorKind::kMalformed,
                         source + ": row " + std::to_string(row) + " bad number '" + cells[j] + "'");
      }
    }
    if (labeled) {
      try {
        labels.push_back(static_cast<std::int32_t>(std::stol(cells.back())));
      } catch (const std::exception&) {
        throw ParseError(ParseErrorKind::kMalformed,
                         source + ": row " + std::to_string(row) + " bad label");
      }
    }
  }

  Matrix x(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(d));
  std::copy(values.begin(), values.end(), x.data());
  if (!labeled) {
    UnlabeledSlice s;
    s.features = std::move(x);
    s.source_id = source;
    return s;
  }
  int c = num_classes;
  if (c <= 0) {
    c = 0;
    for (auto l : labels) c = std::max(c, l + 1);
  }
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] < 0 || labels[i] >= c)
      throw ParseError(ParseErrorKind::kLabelOutOfRange,
                       source + ": row " + std::to_string(i + 1) + " label " +
                           std::to_string(labels[i]));
  LabeledDataset ds;
  ds.features = std::move(x);
  ds.labels = std::move(labels);
  ds.num_classes = c;
  ds.name = std::filesystem::path(source).stem().string();
  return ds;
}

AnyDataset import_csv(const std::filesystem::path& path, int num_classes) {
  std::ifstream in(path);
  if (!in) throw ParseError(ParseErrorKind::kIo, "cannot open " + path.string());
  return import_csv(in, path.string(), num_classes);
}

}  // namespace sst
