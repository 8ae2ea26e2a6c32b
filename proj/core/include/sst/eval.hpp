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
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sst/dataset.hpp"
#include "sst/model.hpp"

namespace sst {

struct RunReport;

struct EvalReport {
  double top1 = 0.0;
  std::vector<double> per_class_acc;
  // True where the test set has no example of the class (accuracy reported as 0).
  std::vector<bool> class_absent;
  std::vector<std::vector<std::int64_t>> confusion;  // [true][predicted]
  std::size_t n_examples = 0;
};

EvalReport evaluate(const Model& model, const LabeledDataset& test);
EvalReport evaluate_predictions(std::span<const std::int32_t> truth,
                                std::span<const std::int32_t> predicted, int num_classes);

std::string format_eval_report(const EvalReport& report);

// Columns iteration,slice_size,hypothesis,params,top1,wall_seconds.
// top1 is printed as a percentage with two decimals, like the tables it
// mirrors; wall_seconds with three.
std::string format_iteration_table(const RunReport& report);

// Same rows prefixed with a `run` column, one block per report.
std::string format_comparison_table(
    const std::vector<std::pair<std::string, const RunReport*>>& runs);

struct TableRow {
  std::string run;
  int iteration = 0;
  std::size_t slice_size = 0;
  std::string hypothesis;
  std::size_t params = 0;
  double top1_percent = 0.0;
  double wall_seconds = 0.0;
};

// Parses either table format back. Lines starting with '#' are skipped.
std::vector<TableRow> parse_iteration_table(std::string_view csv);

}  // namespace sst
