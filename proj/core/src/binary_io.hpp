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

// Little-endian encode/decode helpers shared by the on-disk formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sst/error.hpp"

namespace sst::detail {

class ByteWriter {
 public:
  void bytes(std::string_view s) { buf_.insert(buf_.end(), s.begin(), s.end()); }
  void u32(std::uint32_t v) { put(v, 4); }
  void i32(std::int32_t v) { put(static_cast<std::uint32_t>(v), 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }

  const std::vector<char>& data() const noexcept { return buf_; }

 private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  std::vector<char> buf_;
};

class ByteReader {
 public:
  ByteReader(const std::vector<char>& buf, std::string source)
      : buf_(buf), source_(std::move(source)) {}

  void expect_magic(std::string_view magic) {
    need(magic.size(), "magic");
    if (std::memcmp(buf_.data() + pos_, magic.data(), magic.size()) != 0) {
      throw ParseError(ParseErrorKind::kBadMagic,
                       source_ + ": expected \"" + std::string(magic) + "\"");
    }
    pos_ += magic.size();
  }
  std::uint32_t u32(const char* what) { return static_cast<std::uint32_t>(get(4, what)); }
  std::int32_t i32(const char* what) {
    return static_cast<std::int32_t>(static_cast<std::uint32_t>(get(4, what)));
  }
  std::uint64_t u64(const char* what) { return get(8, what); }
  double f64(const char* what) { return std::bit_cast<double>(get(8, what)); }

  // Throws kTruncated unless at least n more bytes are available.
  void need(std::uint64_t n, const char* what) const {
    if (n > remaining()) {
      throw ParseError(ParseErrorKind::kTruncated,
                       source_ + ": " + what + " needs " + std::to_string(n) +
                           " bytes, " + std::to_string(remaining()) + " left");
    }
  }
  std::uint64_t remaining() const noexcept { return buf_.size() - pos_; }
  void expect_end() const {
    if (remaining() != 0) {
      throw ParseError(ParseErrorKind::kTrailingData,
                       source_ + ": " + std::to_string(remaining()) + " unexpected bytes");
    }
  }
  const std::string& source() const noexcept { return source_; }

 private:
  std::uint64_t get(int n, const char* what) {
    need(static_cast<std::uint64_t>(n), what);
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
    }
    pos_ += n;
    return v;
  }

  const std::vector<char>& buf_;
  std::string source_;
  std::size_t pos_ = 0;
};

std::vector<char> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::vector<char>& data);
void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace sst::detail
