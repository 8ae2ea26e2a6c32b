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
#include <limits>
#include <string_view>
#include <vector>

namespace sst {

// SplitMix64: a counter-based generator. The state advances by a fixed
// odd increment and each output is a pure function of the counter, so a
// reimplementation in any language reproduces the stream exactly:
//
//   state += 0x9E3779B97F4A7C15
//   z = state
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   return z ^ (z >> 31)
//
// Derived quantities:
//   uniform()      = (next() >> 11) * 2^-53            in [0, 1)
//   normal()       = Box-Muller on (u1, u2), cosine branch only:
//                    sqrt(-2 ln(1 - u1)) * cos(2 pi u2)
//   below(n)       = rejection sampling on next() % n with the
//                    threshold (2^64 - n) % n
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kMix1 = 0xBF58476D1CE4E5B9ULL;
  static constexpr std::uint64_t kMix2 = 0x94D049BB133111EBULL;

  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    state_ += kGamma;
    return mix(state_);
  }
  std::uint64_t operator()() noexcept { return next(); }

  static constexpr std::uint64_t min() noexcept { return 0; }
  static constexpr std::uint64_t max() noexcept {
    return std::numeric_limits<std::uint64_t>::max();
  }

  double uniform() noexcept;
  double normal() noexcept;
  std::uint64_t below(std::uint64_t n) noexcept;

  std::uint64_t state() const noexcept { return state_; }

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * kMix1;
    z = (z ^ (z >> 27)) * kMix2;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// Independent child seed for a named sub-task, e.g. derive_seed(seed, "init").
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag,
                          std::uint64_t index = 0) noexcept;

// Fisher-Yates from the last index down, using below().
void shuffle_indices(std::vector<std::size_t>& idx, SplitMix64& rng);
std::vector<std::size_t> permutation(std::size_t n, SplitMix64& rng);

// 64-bit FNV-1a, used for content fingerprints.
class Fnv1a {
 public:
  static constexpr std::uint64_t kOffset = 0xCBF29CE484222325ULL;
  static constexpr std::uint64_t kPrime = 0x100000001B3ULL;

  void update(const void* data, std::size_t n) noexcept;
  void update(std::string_view s) noexcept { update(s.data(), s.size()); }
  void update_u64(std::uint64_t v) noexcept;
  void update_f64(double v) noexcept;
  std::uint64_t digest() const noexcept { return h_; }

 private:
  std::uint64_t h_ = kOffset;
};

}  // namespace sst
