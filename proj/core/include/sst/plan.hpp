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

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sst {

// One pretraining phase of a schedule.
struct PhaseSpec {
  std::string label;
  double num_images = 0;
  double batch_size = 0;
  double sec_per_batch = 0;
  int epochs = 0;

  void validate() const;
};

// (num_images / batch_size) * sec_per_batch * epochs / 3600. Batches per
// epoch are fractional; no ceiling is applied.
double phase_hours(const PhaseSpec& phase);

struct PlanComparison {
  double baseline_hours = 0;   // total(b)
  double candidate_hours = 0;  // total(a)
  double hours_saved = 0;      // total(b) - total(a)
  double dollars_saved = 0;
  double percent_reduction = 0;  // hours_saved / total(b) * 100, 0 when total(b) == 0
};

struct PlanReport {
  std::vector<std::string> phase_labels;
  std::vector<double> phase_hours;
  double total_hours = 0;
  double total_dollars = 0;
  double rate_usd_per_hour = 0;
  std::optional<PlanComparison> comparison;
};

PlanReport plan_total(std::span<const PhaseSpec> phases, double rate_usd_per_hour);

// Costs plan `a` against baseline `b`. Phase fields describe `a`.
PlanReport plan_compare(std::span<const PhaseSpec> a, std::span<const PhaseSpec> b,
                        double rate_usd_per_hour);

// Streaming schedule: 1M/256/0.39s/30, 3M/256/0.39s/20, 7M/128/0.68s/15.
std::vector<PhaseSpec> reference_streaming_plan();
// Single pass over all 11M images: 11M/128/0.68s/30.
std::vector<PhaseSpec> reference_no_streaming_plan();

struct NamedPlan {
  std::string name;
  std::vector<PhaseSpec> phases;
};

// Plan file: INI sections `[phase.N]` (N = 1, 2, ...) with keys
// `plan`, `label`, `num_images`, `batch_size`, `sec_per_batch`, `epochs`.
// Phases are grouped by `plan` (default "plan") in order of first use and
// ordered by N within a plan. An optional `[plan]` section may set
// `rate_usd`.
struct PlanFile {
  std::vector<NamedPlan> plans;
  std::optional<double> rate_usd;
};

PlanFile parse_plan_file(std::string_view text);
PlanFile load_plan_file(const std::filesystem::path& path);

// A table of every plan, plus a comparison block when exactly two plans
// are present (first against second).
std::string format_plan_report(const PlanFile& file, double rate_usd_per_hour);

}  // namespace sst
