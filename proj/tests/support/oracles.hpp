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

// Reference computations for the unit tests. Everything here is written
// with plain loops over std::vector so it shares no code path with the
// library's Eigen implementation.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "sst/dataset.hpp"
#include "sst/model.hpp"

namespace oracle {

using Rows = std::vector<std::vector<double>>;

inline Rows to_rows(const sst::Matrix& m) {
  Rows r(static_cast<std::size_t>(m.rows()), std::vector<double>(static_cast<std::size_t>(m.cols())));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) r[i][j] = m(i, j);
  return r;
}

// Logits of one row, evaluated layer by layer.
inline std::vector<double> forward_row(const sst::Model& m, const std::vector<double>& x) {
  std::vector<double> a = x;
  for (std::size_t l = 0; l < m.layers.size(); ++l) {
    const auto& W = m.layers[l].weight;
    const auto& b = m.layers[l].bias;
    std::vector<double> z(static_cast<std::size_t>(W.cols()), 0.0);
    for (Eigen::Index j = 0; j < W.cols(); ++j) {
      double s = b(j);
      for (Eigen::Index i = 0; i < W.rows(); ++i) s += a[i] * W(i, j);
      z[j] = s;
    }
    if (l + 1 < m.layers.size())
      for (double& v : z) v = v > 0.0 ? v : 0.0;
    a = std::move(z);
  }
  return a;
}

inline double row_ce(const std::vector<double>& logits, int label) {
  long double mx = logits[0];
  for (double v : logits) mx = std::max<long double>(mx, v);
  long double s = 0.0L;
  for (double v : logits) s += std::exp(static_cast<long double>(v) - mx);
  return static_cast<double>(mx + std::log(s) - logits[static_cast<std::size_t>(label)]);
}

inline double mean_loss(const sst::Model& m, const Rows& x, const std::vector<std::int32_t>& y) {
  long double total = 0.0L;
  for (std::size_t i = 0; i < x.size(); ++i) total += row_ce(forward_row(m, x[i]), y[i]);
  return static_cast<double>(total / static_cast<long double>(x.size()));
}

// Central-difference gradient of the mean loss for each parameter, in the
// order layer 0 weight (row-major), layer 0 bias, layer 1 weight, ...
inline std::vector<double> numeric_gradient(sst::Model m, const Rows& x,
                                            const std::vector<std::int32_t>& y, double h) {
  std::vector<double> g;
  auto probe = [&](double& p) {
    const double saved = p;
    p = saved + h;
    const double up = mean_loss(m, x, y);
    p = saved - h;
    const double down = mean_loss(m, x, y);
    p = saved;
    g.push_back((up - down) / (2.0 * h));
  };
  for (auto& layer : m.layers) {
    for (Eigen::Index i = 0; i < layer.weight.rows(); ++i)
      for (Eigen::Index j = 0; j < layer.weight.cols(); ++j) probe(layer.weight(i, j));
    for (Eigen::Index j = 0; j < layer.bias.size(); ++j) probe(layer.bias(j));
  }
  return g;
}

inline std::vector<double> flatten(const std::vector<sst::Layer>& layers) {
  std::vector<double> out;
  for (const auto& layer : layers) {
    for (Eigen::Index i = 0; i < layer.weight.rows(); ++i)
      for (Eigen::Index j = 0; j < layer.weight.cols(); ++j) out.push_back(layer.weight(i, j));
    for (Eigen::Index j = 0; j < layer.bias.size(); ++j) out.push_back(layer.bias(j));
  }
  return out;
}

inline double max_rel_error(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a[i] - b[i]) / std::max(1e-12, std::abs(a[i]) + std::abs(b[i])));
  return worst;
}

// Random inputs for property checks. std::mt19937_64 so the test data does
// not come from the generator under test.
inline sst::Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed,
                                 double scale = 1.0) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> n(0.0, scale);
  sst::Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = n(gen);
  return m;
}

inline std::vector<std::int32_t> random_labels(std::size_t n, int classes, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<int> u(0, classes - 1);
  std::vector<std::int32_t> y(n);
  for (auto& v : y) v = u(gen);
  return y;
}

inline double accuracy(const std::vector<std::int32_t>& a, const std::vector<std::int32_t>& b) {
  std::size_t hit = 0;
  for (std::size_t i = 0; i < a.size(); ++i) hit += a[i] == b[i];
  return static_cast<double>(hit) / static_cast<double>(a.size());
}

// Fresh scratch directory under the system temp dir, removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("sst_test_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::vector<char> read_bytes(const std::filesystem::path& p) {
  std::FILE* f = std::fopen(p.string().c_str(), "rb");
  std::vector<char> out;
  if (!f) return out;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) out.insert(out.end(), buf, buf + n);
  std::fclose(f);
  return out;
}

}  // namespace oracle
