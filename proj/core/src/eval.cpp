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

#include "sst/eval.hpp"

#include <fmt/format.h>

#include "sst/error.hpp"
#include "sst/ini.hpp"
#include "sst/selftrain.hpp"

namespace sst {

EvalReport evaluate_predictions(std::span<const std::int32_t> truth,
                                std::span<const std::int32_t> predicted, int num_classes) {
  if (truth.empty()) throw ValidationError("test", "evaluation set is empty");
  if (truth.size() != predicted.size())
    throw ShapeError("prediction count", static_cast<std::int64_t>(truth.size()),
                     static_cast<std::int64_t>(predicted.size()));
  const auto c = static_cast<std::size_t>(num_classes);
  EvalReport r;
  r.n_examples = truth.size();
  r.confusion.assign(c, std::vector<std::int64_t>(c, 0));
  std::int64_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || truth[i] >= num_classes || predicted[i] < 0 ||
        predicted[i] >= num_classes)
      throw ValidationError("labels", "row " + std::to_string(i) + " out of range");
    ++r.confusion[truth[i]][predicted[i]];
    correct += truth[i] == predicted[i];
  }
  r.top1 = static_cast<double>(correct) / static_cast<double>(truth.size());
  r.per_class_acc.assign(c, 0.0);
  r.class_absent.assign(c, false);
  for (std::size_t k = 0; k < c; ++k) {
    std::int64_t row = 0;
    for (auto v : r.confusion[k]) row += v;
    if (row == 0) {
      r.class_absent[k] = true;
    } else {
      r.per_class_acc[k] = static_cast<double>(r.confusion[k][k]) / static_cast<double>(row);
    }
  }
  return r;
}

EvalReport evaluate(const Model& model, const LabeledDataset& test) {
  if (test.size() == 0) throw ValidationError("test", "evaluation set is empty");
  if (test.num_classes != model.spec.num_classes)
    throw ShapeError("test num_classes", model.spec.num_classes, test.num_classes);
  const Labels pred = predict(model, test.features);
  return evaluate_predictions(test.labels, pred, test.num_classes);
}

std::string format_eval_report(const EvalReport& r) {
  std::string out = fmt::format("n_examples,{}\ntop1,{:.4f}\n", r.n_examples, r.top1);
  out += "class,accuracy,absent\n";
  for (std::size_t k = 0; k < r.per_class_acc.size(); ++k)
    out += fmt::format("{},{:.4f},{}\n", k, r.per_class_acc[k], r.class_absent[k] ? 1 : 0);
  out += "confusion";
  for (std::size_t k = 0; k < r.confusion.size(); ++k) out += fmt::format(",p{}", k);
  out += '\n';
  for (std::size_t k = 0; k < r.confusion.size(); ++k) {
    out += fmt::format("t{}", k);
    for (auto v : r.confusion[k]) out += fmt::format(",{}", v);
    out += '\n';
  }
  return out;
}

namespace {

constexpr std::string_view kIterationHeader =
    "iteration,slice_size,hypothesis,params,top1,wall_seconds";

std::string format_row(const IterationRecord& rec) {
  return fmt::format("{},{},{},{},{:.2f},{:.3f}", rec.t, rec.slice_size, rec.hypothesis.name(),
                     parameter_count(rec.hypothesis), rec.top1 * 100.0, rec.wall_seconds);
}

}  // namespace

std::string format_iteration_table(const RunReport& report) {
  if (report.records.empty()) throw ValidationError("report", "no iterations to format");
  std::string out(kIterationHeader);
  out += '\n';
  for (const auto& rec : report.records) out += format_row(rec) + '\n';
  return out;
}

std::string format_comparison_table(
    const std::vector<std::pair<std::string, const RunReport*>>& runs) {
  std::string out = "run,";
  out += kIterationHeader;
  out += '\n';
  for (const auto& [name, report] : runs)
    for (const auto& rec : report->records) out += name + ',' + format_row(rec) + '\n';
  return out;
}

std::vector<TableRow> parse_iteration_table(std::string_view csv) {
  std::vector<TableRow> rows;
  bool header_seen = false;
  bool has_run = false;
  std::size_t start = 0;
  int line_no = 0;
  while (start < csv.size()) {
    const auto nl = csv.find('\n', start);
    const std::string line =
        trim(csv.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start));
    start = nl == std::string_view::npos ? csv.size() : nl + 1;
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      has_run = line.rfind("run,", 0) == 0;
      const std::string_view body = std::string_view(line).substr(has_run ? 4 : 0);
      if (body != kIterationHeader)
        throw ParseError(ParseErrorKind::kMalformed, "unexpected table header '" + line + "'");
      continue;
    }
    const auto cells = split_list(line);
    const std::size_t off = has_run ? 1 : 0;
    if (cells.size() != 6 + off)
      throw ParseError(ParseErrorKind::kMalformed,
                       "line " + std::to_string(line_no) + ": expected " +
                           std::to_string(6 + off) + " cells");
    try {
      TableRow row;
      if (has_run) row.run = cells[0];
      row.iteration = std::stoi(cells[off]);
      row.slice_size = std::stoull(cells[off + 1]);
      row.hypothesis = cells[off + 2];
      row.params = std::stoull(cells[off + 3]);
      row.top1_percent = std::stod(cells[off + 4]);
      row.wall_seconds = std::stod(cells[off + 5]);
      rows.push_back(std::move(row));
    } catch (const std::exception&) {
      throw ParseError(ParseErrorKind::kMalformed,
                       "line " + std::to_string(line_no) + ": bad numeric field");
    }
  }
  return rows;
}

}  // namespace sst
