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

#include "sst/plan.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "binary_io.hpp"
#include "sst/error.hpp"
#include "sst/ini.hpp"

namespace sst {

void PhaseSpec::validate() const {
  if (!(num_images > 0)) throw ValidationError("num_images", "must be > 0");
  if (!(batch_size > 0)) throw ValidationError("batch_size", "must be > 0");
  if (!(sec_per_batch > 0)) throw ValidationError("sec_per_batch", "must be > 0");
  if (epochs < 0) throw ValidationError("epochs", "must be >= 0");
}

double phase_hours(const PhaseSpec& p) {
  p.validate();
  return (p.num_images / p.batch_size) * p.sec_per_batch * p.epochs / 3600.0;
}

PlanReport plan_total(std::span<const PhaseSpec> phases, double rate) {
  if (!(rate >= 0)) throw ValidationError("rate_usd_per_hour", "must be >= 0");
  PlanReport r;
  r.rate_usd_per_hour = rate;
  for (const auto& p : phases) {
    r.phase_labels.push_back(p.label);
    r.phase_hours.push_back(phase_hours(p));
    r.total_hours += r.phase_hours.back();
  }
  r.total_dollars = r.total_hours * rate;
  return r;
}

PlanReport plan_compare(std::span<const PhaseSpec> a, std::span<const PhaseSpec> b, double rate) {
  PlanReport r = plan_total(a, rate);
  const PlanReport base = plan_total(b, rate);
  PlanComparison c;
  c.candidate_hours = r.total_hours;
  c.baseline_hours = base.total_hours;
  c.hours_saved = base.total_hours - r.total_hours;
  c.dollars_saved = c.hours_saved * rate;
  c.percent_reduction = base.total_hours > 0 ? c.hours_saved / base.total_hours * 100.0 : 0.0;
  r.comparison = c;
  return r;
}

std::vector<PhaseSpec> reference_streaming_plan() {
  return {{"U1", 1'000'000, 256, 0.39, 30},
          {"U2", 3'000'000, 256, 0.39, 20},
          {"U3", 7'000'000, 128, 0.68, 15}};
}

std::vector<PhaseSpec> reference_no_streaming_plan() {
  return {{"U1", 11'000'000, 128, 0.68, 30}};
}

namespace {

double to_number(const IniEntry& e) {
  try {
    std::size_t used = 0;
    const double v = std::stod(e.value, &used);
    if (used != e.value.size()) throw std::invalid_argument("junk");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(e.line, e.key, "expected a number, got '" + e.value + "'");
  }
}

}  // namespace

PlanFile parse_plan_file(std::string_view text) {
  const IniDocument doc = parse_ini(text);
  PlanFile file;
  // plan name -> (phase index -> spec)
  std::vector<std::string> order;
  std::map<std::string, std::map<int, PhaseSpec>> grouped;

  for (const auto& sec : doc.sections) {
    if (sec.name.empty()) {
      if (!sec.entries.empty())
        throw ConfigError(sec.entries.front().line, sec.entries.front().key,
                          "keys must appear inside a section");
      continue;
    }
    if (sec.name == "plan") {
      for (const auto& e : sec.entries) {
        if (e.key != "rate_usd") throw ConfigError(e.line, e.key, "unknown key in [plan]");
        file.rate_usd = to_number(e);
      }
      continue;
    }
    if (sec.name.rfind("phase.", 0) != 0)
      throw ConfigError(sec.line, sec.name, "unknown section (expected [phase.N] or [plan])");
    int index = 0;
    try {
      std::size_t used = 0;
      const std::string n = sec.name.substr(6);
      index = std::stoi(n, &used);
      if (used != n.size() || index < 1) throw std::invalid_argument("bad");
    } catch (const std::exception&) {
      throw ConfigError(sec.line, sec.name, "phase index must be a positive integer");
    }

    PhaseSpec p;
    std::string plan = "plan";
    bool has[4] = {false, false, false, false};
    for (const auto& e : sec.entries) {
      if (e.key == "plan") plan = e.value;
      else if (e.key == "label") p.label = e.value;
      else if (e.key == "num_images") { p.num_images = to_number(e); has[0] = true; }
      else if (e.key == "batch_size") { p.batch_size = to_number(e); has[1] = true; }
      else if (e.key == "sec_per_batch") { p.sec_per_batch = to_number(e); has[2] = true; }
      else if (e.key == "epochs") {
        const double v = to_number(e);
        if (v != std::floor(v)) throw ConfigError(e.line, e.key, "must be an integer");
        p.epochs = static_cast<int>(v);
        has[3] = true;
      } else {
        throw ConfigError(e.line, e.key, "unknown key in [" + sec.name + "]");
      }
    }
    const char* names[4] = {"num_images", "batch_size", "sec_per_batch", "epochs"};
    for (int k = 0; k < 4; ++k)
      if (!has[k]) throw ConfigError(sec.line, names[k], "missing in [" + sec.name + "]");
    try {
      p.validate();
    } catch (const ValidationError& v) {
      throw ConfigError(sec.line, v.field(), v.what());
    }
    if (p.label.empty()) p.label = sec.name;
    if (!grouped.count(plan)) order.push_back(plan);
    if (!grouped[plan].emplace(index, p).second)
      throw ConfigError(sec.line, sec.name, "duplicate phase index in plan '" + plan + "'");
  }

  for (const auto& name : order) {
    NamedPlan np{name, {}};
    for (auto& [idx, spec] : grouped[name]) np.phases.push_back(spec);
    file.plans.push_back(std::move(np));
  }
  return file;
}

PlanFile load_plan_file(const std::filesystem::path& path) {
  return parse_plan_file(detail::read_text_file(path));
}

std::string format_plan_report(const PlanFile& file, double rate) {
  std::string out = "plan,phase,num_images,batch_size,sec_per_batch,epochs,hours\n";
  std::vector<PlanReport> totals;
  for (const auto& plan : file.plans) {
    const PlanReport r = plan_total(plan.phases, rate);
    for (std::size_t i = 0; i < plan.phases.size(); ++i) {
      const auto& p = plan.phases[i];
      out += fmt::format("{},{},{:.0f},{:g},{:g},{},{:.3f}\n", plan.name, p.label, p.num_images,
                         p.batch_size, p.sec_per_batch, p.epochs, r.phase_hours[i]);
    }
    totals.push_back(r);
  }
  out += "\nplan,total_hours,total_usd\n";
  for (std::size_t i = 0; i < totals.size(); ++i)
    out += fmt::format("{},{:.2f},{:.2f}\n", file.plans[i].name, totals[i].total_hours,
                       totals[i].total_dollars);
  if (file.plans.size() == 2) {
    const PlanReport c = plan_compare(file.plans[0].phases, file.plans[1].phases, rate);
    out += fmt::format(
        "\ncomparison,{} vs {}\nrate_usd_per_hour,{:g}\nhours_saved,{:.2f}\n"
        "dollars_saved,{:.1f}\npercent_reduction,{:.1f}\n",
        file.plans[0].name, file.plans[1].name, rate, c.comparison->hours_saved,
        c.comparison->dollars_saved, c.comparison->percent_reduction);
  }
  return out;
}

}  // namespace sst
