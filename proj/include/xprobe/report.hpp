// Copyright 2026 The exposure-probe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "xprobe/dataset.hpp"
#include "xprobe/genmatch.hpp"
#include "xprobe/io.hpp"
#include "xprobe/metrics.hpp"

namespace xprobe {

inline constexpr std::string_view kToolVersion = "exposure-probe 1.0.0";
inline constexpr std::string_view kEmptyCell = "—";

// Rounds each value to `decimals` places so that the rounded values sum to
// the rounded total exactly (largest-remainder apportionment).  Returned as
// integer multiples of 10^-decimals.
std::vector<long long> apportion(std::span<const double> values, int decimals);

// "0.25"-style rendering of an apportioned value.
std::string format_fixed(long long scaled, int decimals);

// Category,Count,#Commits,% with a Total row.  Percentages and mean commits
// are rounded half-up to integers; an empty category shows the empty cell.
std::string emit_exposure_table(const ExposureSummary& summary);

using ConditionTable = std::map<ExposureCategory, std::map<Metric, PreferenceCell>>;

// One row per metric, Fix/Bug fraction columns per condition, e.g.
//   model,metric,OnlyFix.fix,OnlyFix.bug,OnlyBug.fix,OnlyBug.bug
std::string emit_preference_tables(const std::string& model, const ConditionTable& table,
                                   std::span<const ExposureCategory> conditions);

// Tidy form: metric,condition,fix_fraction,bug_fraction,ties,n.
std::string emit_preference_csv(const ConditionTable& table);

struct CategoryBreakdownRow {
  ExposureCategory condition = ExposureCategory::kNeither;
  std::string bug_category;
  Metric metric = Metric::kLength;
  PreferenceCell cell;
};

// Per (condition, bug category, metric) verdict counts.
std::vector<CategoryBreakdownRow> category_breakdown(std::span<const PreferenceVerdict> verdicts,
                                                     std::span<const CategoryRecord> records);
// condition,bug_category,metric,fix,bug,ties
std::string emit_category_breakdown(std::span<const CategoryBreakdownRow> rows);

// exposure,outcome,count,fraction
std::string emit_generation_rates(const std::map<ExposureCategory, OutcomeRates>& rates);

// Full-precision sidecar holding the same numbers as the CSVs.
Json preference_table_json(const std::string& model, const ConditionTable& table);
Json generation_rates_json(const std::map<ExposureCategory, OutcomeRates>& rates);
Json exposure_summary_json(const ExposureSummary& summary);

}  // namespace xprobe
