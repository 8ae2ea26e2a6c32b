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

#include "sst/checkpoint.hpp"

#include "binary_io.hpp"
#include "sst/error.hpp"

namespace sst {

std::vector<char> encode_checkpoint(const Model& model, int iteration,
                                    std::uint64_t manifest_fingerprint) {
  model.validate();
  detail::ByteWriter w;
  w.bytes(std::string_view(kCheckpointMagic, 8));
  w.u32(kCheckpointVersion);
  const auto& spec = model.spec;
  w.u32(spec.kind == ModelKind::kLinear ? 0u : 1u);
  w.u32(static_cast<std::uint32_t>(spec.input_dim));
  w.u32(static_cast<std::uint32_t>(spec.num_classes));
  w.u32(static_cast<std::uint32_t>(spec.capacity_index));
  w.u32(static_cast<std::uint32_t>(spec.hidden_sizes.size()));
  for (int h : spec.hidden_sizes) w.u32(static_cast<std::uint32_t>(h));
  w.u64(model.init_seed);
  w.i32(iteration);
  w.u64(manifest_fingerprint);
  w.u64(model.parameter_count());
  for (const auto& l : model.layers) {
    for (Eigen::Index k = 0; k < l.weight.size(); ++k) w.f64(l.weight.data()[k]);
    for (Eigen::Index k = 0; k < l.bias.size(); ++k) w.f64(l.bias.data()[k]);
  }
  return w.data();
}

Checkpoint decode_checkpoint(const std::vector<char>& bytes, const std::string& source) {
  detail::ByteReader r(bytes, source);
  r.expect_magic(std::string_view(kCheckpointMagic, 8));
  Checkpoint ck;
  ck.version = r.u32("version");
  if (ck.version != kCheckpointVersion)
    throw ParseError(ParseErrorKind::kUnsupportedVersion,
                     source + ": checkpoint version " + std::to_string(ck.version) +
                         ", expected " + std::to_string(kCheckpointVersion));
  HypothesisSpec spec;
  const auto kind = r.u32("kind");
  if (kind > 1) throw ParseError(ParseErrorKind::kMalformed, source + ": unknown model kind");
  spec.kind = kind == 0 ? ModelKind::kLinear : ModelKind::kMlp;
  spec.input_dim = static_cast<int>(r.u32("input_dim"));
  spec.num_classes = static_cast<int>(r.u32("num_classes"));
  spec.capacity_index = static_cast<int>(r.u32("capacity_index"));
  const auto n_hidden = r.u32("n_hidden");
  if (n_hidden > 64) throw ParseError(ParseErrorKind::kMalformed, source + ": too many layers");
  for (std::uint32_t i = 0; i < n_hidden; ++i)
    spec.hidden_sizes.push_back(static_cast<int>(r.u32("hidden size")));
  try {
    spec.validate();
  } catch (const ValidationError& e) {
    throw ParseError(ParseErrorKind::kMalformed, source + ": " + e.what());
  }

  Model model;
  model.spec = spec;
  model.init_seed = r.u64("init_seed");
  ck.iteration = r.i32("iteration");
  ck.manifest_fingerprint = r.u64("manifest_fingerprint");
  const auto count = r.u64("parameter_count");
  if (count != parameter_count(spec))
    throw ParseError(ParseErrorKind::kMalformed,
                     source + ": parameter count " + std::to_string(count) + " does not match " +
                         spec.name());
  r.need(count * 8, "parameters");

  std::vector<int> widths{spec.input_dim};
  widths.insert(widths.end(), spec.hidden_sizes.begin(), spec.hidden_sizes.end());
  widths.push_back(spec.num_classes);
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    Layer layer;
    layer.weight.resize(widths[i], widths[i + 1]);
    layer.bias.resize(widths[i + 1]);
    for (Eigen::Index k = 0; k < layer.weight.size(); ++k) layer.weight.data()[k] = r.f64("weight");
    for (Eigen::Index k = 0; k < layer.bias.size(); ++k) layer.bias.data()[k] = r.f64("bias");
    model.layers.push_back(std::move(layer));
  }
  r.expect_end();
  ck.model = std::move(model);
  return ck;
}

void save_checkpoint(const std::filesystem::path& path, const Model& model, int iteration,
                     std::uint64_t manifest_fingerprint) {
  detail::write_file(path, encode_checkpoint(model, iteration, manifest_fingerprint));
}

Checkpoint load_checkpoint(const std::filesystem::path& path,
                           std::optional<std::uint64_t> expected_fingerprint) {
  Checkpoint ck = decode_checkpoint(detail::read_file(path), path.string());
  if (expected_fingerprint && ck.manifest_fingerprint != *expected_fingerprint)
    throw ParseError(ParseErrorKind::kFingerprintMismatch,
                     path.string() + ": checkpoint belongs to manifest " +
                         std::to_string(ck.manifest_fingerprint) + ", expected " +
                         std::to_string(*expected_fingerprint));
  return ck;
}

std::vector<char> encode_pseudo_labels(const PseudoLabelCache& cache) {
  detail::ByteWriter w;
  w.bytes(std::string_view(kPseudoLabelMagic, 8));
  w.u32(kPseudoLabelVersion);
  w.u64(cache.labels.size());
  for (auto l : cache.labels) w.i32(l);
  w.u64(cache.labeler_fingerprint);
  return w.data();
}

PseudoLabelCache decode_pseudo_labels(const std::vector<char>& bytes, const std::string& source) {
  detail::ByteReader r(bytes, source);
  r.expect_magic(std::string_view(kPseudoLabelMagic, 8));
  const auto version = r.u32("version");
  if (version != kPseudoLabelVersion)
    throw ParseError(ParseErrorKind::kUnsupportedVersion,
                     source + ": pseudo-label cache version " + std::to_string(version));
  const auto m = r.u64("M");
  if (m > (std::uint64_t{1} << 40)) throw ParseError(ParseErrorKind::kMalformed, source + ": M");
  r.need(m * 4 + 8, "labels");
  PseudoLabelCache cache;
  cache.labels.resize(m);
  for (std::uint64_t i = 0; i < m; ++i) {
    cache.labels[i] = r.i32("label");
    if (cache.labels[i] < 0)
      throw ParseError(ParseErrorKind::kLabelOutOfRange,
                       source + ": row " + std::to_string(i) + " label " +
                           std::to_string(cache.labels[i]));
  }
  cache.labeler_fingerprint = r.u64("labeler_fingerprint");
  r.expect_end();
  return cache;
}

void save_pseudo_labels(const std::filesystem::path& path, const PseudoLabeledDataset& pseudo) {
  save_pseudo_labels(path, PseudoLabelCache{pseudo.pseudo_labels, pseudo.labeler_fingerprint});
}

void save_pseudo_labels(const std::filesystem::path& path, const PseudoLabelCache& cache) {
  detail::write_file(path, encode_pseudo_labels(cache));
}

PseudoLabelCache load_pseudo_labels(const std::filesystem::path& path) {
  return decode_pseudo_labels(detail::read_file(path), path.string());
}

}  // namespace sst
