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
#include <stdexcept>
#include <string>

namespace sst {

// Base of every error the library throws. what() is a single line.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value violates a documented precondition or invariant.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class ShapeError : public Error {
 public:
  ShapeError(const std::string& what, std::int64_t expected, std::int64_t actual)
      : Error(what + ": expected " + std::to_string(expected) + ", got " +
              std::to_string(actual)),
        expected_(expected),
        actual_(actual) {}
  std::int64_t expected() const noexcept { return expected_; }
  std::int64_t actual() const noexcept { return actual_; }

 private:
  std::int64_t expected_;
  std::int64_t actual_;
};

// Requested more rows than a pool holds.
class CapacityError : public Error {
 public:
  CapacityError(std::uint64_t requested, std::uint64_t available)
      : Error("stream needs " + std::to_string(requested) + " rows but pool has " +
              std::to_string(available) + " (deficit " +
              std::to_string(requested - available) + ")"),
        deficit_(requested - available) {}
  std::uint64_t deficit() const noexcept { return deficit_; }

 private:
  std::uint64_t deficit_;
};

// Training produced a non-finite loss.
class DivergenceError : public Error {
 public:
  DivergenceError(int epoch, double lr, const std::string& context = {})
      : Error((context.empty() ? std::string() : context + ": ") +
              "non-finite loss at epoch " + std::to_string(epoch) +
              " (lr=" + std::to_string(lr) + ")"),
        epoch_(epoch),
        lr_(lr) {}
  int epoch() const noexcept { return epoch_; }
  double lr() const noexcept { return lr_; }

 private:
  int epoch_;
  double lr_;
};

enum class ParseErrorKind {
  kBadMagic,
  kUnsupportedVersion,
  kTruncated,
  kLabelOutOfRange,
  kTrailingData,
  kFingerprintMismatch,
  kMalformed,
  kIo,
};

const char* to_string(ParseErrorKind kind) noexcept;

// Failure while reading a file or structured text.
class ParseError : public Error {
 public:
  ParseError(ParseErrorKind kind, const std::string& detail)
      : Error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}
  ParseErrorKind kind() const noexcept { return kind_; }

 private:
  ParseErrorKind kind_;
};

// Manifest / plan-file errors carry the offending line and key.
class ConfigError : public Error {
 public:
  ConfigError(int line, std::string key, const std::string& message)
      : Error("line " + std::to_string(line) + ": " +
              (key.empty() ? std::string() : key + ": ") + message),
        line_(line),
        key_(std::move(key)) {}
  int line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

 private:
  int line_;
  std::string key_;
};

}  // namespace sst
