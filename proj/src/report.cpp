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

#include "xprobe/report.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace xprobe {

std::vector<long long> apportion(std::span<const double> values, int decimals) {
  const double scale = std::pow(10.0, decimals);
  std::vector<long long> floors(values.size());
  std::vector<std::pair<double, std::size_t>> rem(values.size());
  double total = 0.0;
  long long floor_sum = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double x = values[i] * scale;
    total += values[i];
    floors[i] = static_cast<long long>(std::floor(x + 1e-9));
    floor_sum += floors[i];
    rem[i] = {x - static_cast<double>(floors[i]), i};
  }
  const long long target = std::llround(total * scale);
  std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (long long k = 0; k < target - floor_sum && k < static_cast<long long>(rem.size()); ++k) {
    ++floors[rem[static_cast<std::size_t>(k)].second];
  }
  return floors;
}

std::string format_fixed(long long scaled, int decimals) {
  if (decimals == 0) return std::to_string(scaled);
  long long unit = 1;
  for (int i = 0; i < decimals; ++i) unit *= 10;
  std::string frac = std::to_string(std::llabs(scaled) % unit);
  frac.insert(0, static_cast<std::size_t>(decimals) - frac.size(), '0');
  return (scaled < 0 ? "-" : "") + std::to_string(std::llabs(scaled) / unit) + "." + frac;
}

namespace {

std::string round_int(double x) { return std::to_string(std::llround(x)); }

// Two-decimal fix/bug pair that sums to exactly 1.00, or two empty cells.
std::pair<std::string, std::string> fix_bug_cells(const PreferenceCell& cell) {
  const auto fix = cell.fix_fraction();
  if (!fix) return {std::string(kEmptyCell), std::string(kEmptyCell)};
  const double v[2] = {*fix, *cell.bug_fraction()};
  const auto a = apportion(v, 2);
  return {format_fixed(a[0], 2), format_fixed(a[1], 2)};
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

std::string emit_exposure_table(const ExposureSummary& s) {
  std::ostringstream out;
  out << "Category,Count,#Commits,%\n";
  for (const ExposureRow& row : s.rows) {
    out << category_label(row.category) << ',' << row.count << ','
        << (row.mean_commits ? round_int(*row.mean_commits) : std::string(kEmptyCell)) << ','
        << round_int(row.fraction * 100.0) << "%\n";
  }
  out << "Total," << s.total << ','
      << (s.mean_commits ? round_int(*s.mean_commits) : std::string(kEmptyCell)) << ",\n";
  return out.str();
}

std::string emit_preference_tables(const std::string& model, const ConditionTable& table,
                                   std::span<const ExposureCategory> conditions) {
  std::ostringstream out;
  out << "model,metric";
  for (auto c : conditions) out << ',' << category_id(c) << ".fix," << category_id(c) << ".bug";
  out << '\n';
  for (Metric m : kAllMetrics) {
    out << csv_field(model) << ',' << metric_name(m);
    for (auto c : conditions) {
      PreferenceCell cell;
      if (const auto it = table.find(c); it != table.end()) {
        if (const auto jt = it->second.find(m); jt != it->second.end()) cell = jt->second;
      }
      const auto [fix, bug] = fix_bug_cells(cell);
      out << ',' << fix << ',' << bug;
    }
    out << '\n';
  }
  return out.str();
}

std::string emit_preference_csv(const ConditionTable& table) {
  std::ostringstream out;
  out << "metric,condition,fix_fraction,bug_fraction,ties,n\n";
  for (Metric m : kAllMetrics) {
    for (const auto& [cond, cells] : table) {
      const auto it = cells.find(m);
      const PreferenceCell cell = it == cells.end() ? PreferenceCell{} : it->second;
      const auto [fix, bug] = fix_bug_cells(cell);
      out << metric_name(m) << ',' << category_id(cond) << ',' << fix << ',' << bug << ','
          << cell.ties << ',' << cell.n() << '\n';
    }
  }
  return out.str();
}

std::vector<CategoryBreakdownRow> category_breakdown(std::span<const PreferenceVerdict> verdicts,
                                                     std::span<const CategoryRecord> records) {
  std::map<std::string_view, const CategoryRecord*> by_id;
  for (const auto& r : records) {
    if (!r.excluded) by_id[r.pair_id] = &r;
  }
  std::map<std::tuple<ExposureCategory, std::string, Metric>, PreferenceCell> cells;
  for (const auto& v : verdicts) {
    const auto it = by_id.find(v.pair_id);
    if (it == by_id.end()) continue;
    PreferenceCell& cell = cells[{it->second->category, it->second->bug_category, v.metric}];
    switch (v.preferred) {
      case Preferred::kFix: ++cell.fix; break;
      case Preferred::kBug: ++cell.bug; break;
      case Preferred::kTie: ++cell.ties; break;
    }
  }
  std::vector<CategoryBreakdownRow> rows;
  rows.reserve(cells.size());
  for (const auto& [key, cell] : cells) {
    rows.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), cell});
  }
  return rows;
}

std::string emit_category_breakdown(std::span<const CategoryBreakdownRow> rows) {
  std::ostringstream out;
  out << "condition,bug_category,metric,fix,bug,ties\n";
  for (const auto& r : rows) {
    out << category_id(r.condition) << ',' << csv_field(r.bug_category) << ','
        << metric_name(r.metric) << ',' << r.cell.fix << ',' << r.cell.bug << ',' << r.cell.ties
        << '\n';
  }
  return out.str();
}

std::string emit_generation_rates(const std::map<ExposureCategory, OutcomeRates>& rates) {
  std::ostringstream out;
  out << "exposure,outcome,count,fraction\n";
  for (const auto& [cat, r] : rates) {
    const auto fr = r.fractions();
    std::vector<long long> scaled;
    if (fr) scaled = apportion(*fr, 2);
    for (std::size_t i = 0; i < kAllOutcomes.size(); ++i) {
      out << category_id(cat) << ',' << outcome_label(kAllOutcomes[i]) << ',' << r.counts[i] << ','
          << (fr ? format_fixed(scaled[i], 2) : std::string(kEmptyCell)) << '\n';
    }
  }
  return out.str();
}

Json preference_table_json(const std::string& model, const ConditionTable& table) {
  Json rows = Json::array();
  for (const auto& [cond, cells] : table) {
    for (const auto& [m, cell] : cells) {
      rows.push_back({{"condition", category_id(cond)},
                      {"metric", metric_name(m)},
                      {"fix", cell.fix},
                      {"bug", cell.bug},
                      {"ties", cell.ties},
                      {"fix_fraction", optional_number(cell.fix_fraction())},
                      {"bug_fraction", optional_number(cell.bug_fraction())}});
    }
  }
  return {{"model", model}, {"cells", rows}};
}

Json generation_rates_json(const std::map<ExposureCategory, OutcomeRates>& rates) {
  Json out = Json::object();
  for (const auto& [cat, r] : rates) {
    Json entry = {{"n", r.n}};
    const auto fr = r.fractions();
    for (std::size_t i = 0; i < kAllOutcomes.size(); ++i) {
      entry[std::string(outcome_id(kAllOutcomes[i]))] = {
          {"count", r.counts[i]}, {"fraction", fr ? Json((*fr)[i]) : Json(nullptr)}};
    }
    out[std::string(category_id(cat))] = entry;
  }
  return out;
}

Json exposure_summary_json(const ExposureSummary& s) {
  Json rows = Json::array();
  for (const auto& row : s.rows) {
    rows.push_back({{"category", category_id(row.category)},
                    {"count", row.count},
                    {"fraction", row.fraction},
                    {"mean_commits", optional_number(row.mean_commits)}});
  }
  return {{"rows", rows}, {"total", s.total}, {"mean_commits", optional_number(s.mean_commits)}};
}

}  // namespace xprobe
