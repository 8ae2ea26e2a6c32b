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

#include "sst/rng.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <numbers>

#include "sst/error.hpp"

namespace sst {

const char* to_string(ParseErrorKind kind) noexcept {
  switch (kind) {
    case ParseErrorKind::kBadMagic: return "bad magic";
    case ParseErrorKind::kUnsupportedVersion: return "version mismatch";
    case ParseErrorKind::kTruncated: return "truncated";
    case ParseErrorKind::kLabelOutOfRange: return "label out of range";
    case ParseErrorKind::kTrailingData: return "trailing data";
    case ParseErrorKind::kFingerprintMismatch: return "fingerprint mismatch";
    case ParseErrorKind::kMalformed: return "malformed";
    case ParseErrorKind::kIo: return "io error";
  }
  return "unknown";
}

double SplitMix64::uniform() noexcept {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double SplitMix64::normal() noexcept {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(1.0 - u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t SplitMix64::below(std::uint64_t n) noexcept {
  if (n <= 1) return 0;
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = next();
    if (r >= threshold) return r % n;
  }
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag,
                          std::uint64_t index) noexcept {
  Fnv1a h;
  h.update(tag);
  std::uint64_t z = SplitMix64::mix(seed + SplitMix64::kGamma);
  z = SplitMix64::mix(z ^ h.digest());
  return SplitMix64::mix(z + index * SplitMix64::kGamma);
}

void shuffle_indices(std::vector<std::size_t>& idx, SplitMix64& rng) {
  for (std::size_t i = idx.size(); i > 1; --i) {
    const std::size_t j = rng.below(i);
    std::swap(idx[i - 1], idx[j]);
  }
}

std::vector<std::size_t> permutation(std::size_t n, SplitMix64& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  shuffle_indices(idx, rng);
  return idx;
}

void Fnv1a::update(const void* data, std::size_t n) noexcept {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h_ ^= p[i];
    h_ *= kPrime;
  }
}

void Fnv1a::update_u64(std::uint64_t v) noexcept {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  update(b, 8);
}

void Fnv1a::update_f64(double v) noexcept {
  update_u64(std::bit_cast<std::uint64_t>(v));
}

}  // namespace sst
