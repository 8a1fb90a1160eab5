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

#include "xprobe/dataset.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include "xprobe/error.hpp"
#include "xprobe/hash.hpp"

namespace xprobe {
namespace {

std::optional<std::string> get_string(const Json& rec, const char* key) {
  const auto it = rec.find(key);
  if (it == rec.end() || !it->is_string()) return std::nullopt;
  return it->get<std::string>();
}

bool has(const Json& rec, const char* key) { return rec.find(key) != rec.end(); }

std::variant<BugFixPair, std::string> parse_native(const Json& rec) {
  BugFixPair p;
  for (const char* key : {"pair_id", "bug_text", "fix_text"}) {
    if (!has(rec, key)) return std::string("missing field \"") + key + "\"";
    if (!rec.at(key).is_string()) return std::string("field \"") + key + "\" must be a string";
  }
  p.pair_id = rec.at("pair_id").get<std::string>();
  p.bug_text = rec.at("bug_text").get<std::string>();
  p.fix_text = rec.at("fix_text").get<std::string>();
  if (p.pair_id.empty()) return std::string("field \"pair_id\" must be non-empty");

  if (has(rec, "context_before")) {
    if (!rec.at("context_before").is_string()) return std::string("field \"context_before\" must be a string");
    p.context_before = rec.at("context_before").get<std::string>();
  }
  if (has(rec, "bug_category")) {
    if (!rec.at("bug_category").is_string()) return std::string("field \"bug_category\" must be a string");
    p.bug_category = normalize_bug_category(rec.at("bug_category").get<std::string>());
  }
  if (has(rec, "commits_until_fix")) {
    const Json& c = rec.at("commits_until_fix");
    if (!c.is_number_integer() || c.get<std::int64_t>() < 0) {
      return std::string("field \"commits_until_fix\" must be a non-negative integer");
    }
    p.commits_until_fix = c.get<std::uint64_t>();
  }
  for (const char* key : {"source_file_bug", "source_file_fix"}) {
    if (!has(rec, key) || rec.at(key).is_null()) continue;
    if (!rec.at(key).is_string()) return std::string("field \"") + key + "\" must be a string";
    (std::string_view(key) == "source_file_bug" ? p.source_file_bug : p.source_file_fix) =
        rec.at(key).get<std::string>();
  }
  return p;
}

// ManySStuBs4J: sourceBeforeFix / sourceAfterFix / bugType / fixCommitSHA1 /
// bugFilePath / bugLineNum, plus optional commitsUntilFix and contextBefore.
std::variant<BugFixPair, std::string> parse_manysstubs(const Json& rec) {
  Json native = Json::object();
  const auto before = get_string(rec, "sourceBeforeFix");
  const auto after = get_string(rec, "sourceAfterFix");
  if (!before) return std::string("missing field \"sourceBeforeFix\"");
  if (!after) return std::string("missing field \"sourceAfterFix\"");
  native["bug_text"] = *before;
  native["fix_text"] = *after;
  std::string id = get_string(rec, "fixCommitSHA1").value_or("");
  if (auto path = get_string(rec, "bugFilePath")) id += ":" + *path;
  if (has(rec, "bugLineNum") && rec.at("bugLineNum").is_number_integer()) {
    id += ":" + std::to_string(rec.at("bugLineNum").get<std::int64_t>());
  }
  if (id.empty()) return std::string("missing fields \"fixCommitSHA1\"/\"bugFilePath\"");
  native["pair_id"] = id;
  if (auto type = get_string(rec, "bugType")) native["bug_category"] = *type;
  if (has(rec, "commitsUntilFix")) native["commits_until_fix"] = rec.at("commitsUntilFix");
  if (auto ctx = get_string(rec, "contextBefore")) native["context_before"] = *ctx;
  return parse_native(native);
}

}  // namespace

std::variant<BugFixPair, std::string> parse_pair_record(const Json& record) {
  auto parsed = (!has(record, "pair_id") && has(record, "sourceBeforeFix")) ? parse_manysstubs(record)
                                                                             : parse_native(record);
  if (auto* p = std::get_if<BugFixPair>(&parsed)) {
    if (p->bug_text == p->fix_text) return std::string("bug_text and fix_text are identical");
  }
  return parsed;
}

PairLoadResult load_pairs(const std::filesystem::path& path) {
  PairLoadResult out;
  std::set<std::string> seen_ids;
  for_each_jsonl(
      path,
      [&](std::size_t line, const Json& rec) {
        auto parsed = parse_pair_record(rec);
        if (auto* err = std::get_if<std::string>(&parsed)) {
          out.rejected.push_back({line, *err});
          return;
        }
        auto& pair = std::get<BugFixPair>(parsed);
        if (!seen_ids.insert(pair.pair_id).second) {
          out.rejected.push_back({line, "duplicate pair_id \"" + pair.pair_id + "\""});
          return;
        }
        out.pairs.push_back(std::move(pair));
      },
      [&](std::size_t line, const std::string& msg) { out.rejected.push_back({line, msg}); });
  if (out.pairs.empty()) throw Error("dataset " + path.string() + " contains no valid pairs");
  return out;
}

Json pair_to_json(const BugFixPair& p) {
  Json j = {{"pair_id", p.pair_id},
            {"bug_text", p.bug_text},
            {"fix_text", p.fix_text},
            {"context_before", p.context_before},
            {"bug_category", p.bug_category},
            {"commits_until_fix", p.commits_until_fix}};
  if (p.source_file_bug) j["source_file_bug"] = *p.source_file_bug;
  if (p.source_file_fix) j["source_file_fix"] = *p.source_file_fix;
  return j;
}

Json exposure_to_json(const VariantExposure& e) {
  return {{"pair_id", e.pair_id},
          {"variant", variant_name(e.variant)},
          {"hits", e.report.hit_window_count},
          {"expected", e.report.expected_aligned_count},
          {"score", e.report.exposure_score},
          {"coverage", e.report.coverage_fraction},
          {"seen", e.report.seen},
          {"unsound", e.report.unsound}};
}

VariantExposure exposure_from_json(const Json& rec) {
  try {
    VariantExposure e;
    e.pair_id = rec.at("pair_id").get<std::string>();
    const auto v = parse_variant(rec.at("variant").get<std::string>());
    if (!v) throw Error("variant must be \"bug\" or \"fix\"");
    e.variant = *v;
    e.report.hit_window_count = rec.at("hits").get<std::size_t>();
    e.report.expected_aligned_count = rec.at("expected").get<std::size_t>();
    e.report.exposure_score = rec.at("score").get<double>();
    e.report.coverage_fraction = rec.at("coverage").get<double>();
    e.report.seen = rec.at("seen").get<bool>();
    e.report.unsound = rec.at("unsound").get<bool>();
    return e;
  } catch (const Json::exception& ex) {
    throw Error(std::string("malformed exposure record: ") + ex.what());
  }
}

std::vector<VariantExposure> load_exposure(const std::filesystem::path& path) {
  std::vector<VariantExposure> out;
  for_each_jsonl(
      path,
      [&](std::size_t line, const Json& rec) {
        try {
          out.push_back(exposure_from_json(rec));
        } catch (const Error& e) {
          throw SchemaError(line, e.what());
        }
      },
      [&](std::size_t line, const std::string& msg) { throw SchemaError(line, msg); });
  return out;
}

StratifyResult stratify(std::span<const BugFixPair> pairs, std::span<const VariantExposure> reports,
                        bool include_unsound) {
  std::unordered_map<std::string, std::array<const ExposureReport*, 2>> by_pair;
  for (const auto& r : reports) {
    by_pair[r.pair_id][r.variant == Variant::kBug ? 0 : 1] = &r.report;
  }
  StratifyResult out;
  for (const auto& pair : pairs) {
    const auto it = by_pair.find(pair.pair_id);
    for (Variant v : {Variant::kBug, Variant::kFix}) {
      if (it == by_pair.end() || it->second[v == Variant::kBug ? 0 : 1] == nullptr) {
        throw Error("pair " + pair.pair_id + " has no " + std::string(variant_name(v)) +
                    " exposure report");
      }
    }
    const ExposureReport& bug = *it->second[0];
    const ExposureReport& fix = *it->second[1];
    if ((bug.unsound || fix.unsound) && !include_unsound) {
      out.excluded.push_back(pair.pair_id);
      continue;
    }
    out.categories[pair.pair_id] = category_from_seen(bug.seen, fix.seen);
  }
  return out;
}

ExposureSummary summarize_exposure(std::span<const BugFixPair> pairs,
                                   const std::map<std::string, ExposureCategory>& categories) {
  std::array<std::size_t, 4> counts{};
  std::array<long double, 4> commit_sums{};
  for (const auto& p : pairs) {
    const auto it = categories.find(p.pair_id);
    if (it == categories.end()) continue;
    const auto idx = static_cast<std::size_t>(it->second);
    ++counts[idx];
    commit_sums[idx] += static_cast<long double>(p.commits_until_fix);
  }
  ExposureSummary s;
  long double all_commits = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    s.total += counts[i];
    all_commits += commit_sums[i];
  }
  for (std::size_t i = 0; i < 4; ++i) {
    ExposureRow& row = s.rows[i];
    row.category = kAllCategories[i];
    row.count = counts[i];
    row.fraction = s.total == 0 ? 0.0 : static_cast<double>(counts[i]) / static_cast<double>(s.total);
    if (counts[i] > 0) row.mean_commits = static_cast<double>(commit_sums[i] / counts[i]);
  }
  if (s.total > 0) s.mean_commits = static_cast<double>(all_commits / s.total);
  return s;
}

BalancedSample sample_balanced(const std::map<std::string, ExposureCategory>& categories,
                               std::size_t per_category_n, std::uint64_t seed) {
  std::map<ExposureCategory, std::vector<std::pair<std::uint64_t, std::string>>> ranked;
  for (const auto& [id, cat] : categories) {
    ranked[cat].emplace_back(murmur3_128(id, seed).lo, id);
  }
  BalancedSample out;
  for (auto cat : kAllCategories) {
    auto& members = ranked[cat];
    if (members.size() < per_category_n) {
      out.warnings.push_back("category " + std::string(category_id(cat)) + " has only " +
                             std::to_string(members.size()) + " pairs, fewer than the requested " +
                             std::to_string(per_category_n));
    }
    const std::size_t take = std::min(per_category_n, members.size());
    std::partial_sort(members.begin(), members.begin() + static_cast<std::ptrdiff_t>(take),
                      members.end());
    auto& ids = out.pair_ids[cat];
    for (std::size_t i = 0; i < take; ++i) ids.push_back(members[i].second);
  }
  return out;
}

Json category_to_json(const CategoryRecord& r) {
  return {{"pair_id", r.pair_id},
          {"category", category_id(r.category)},
          {"excluded", r.excluded},
          {"bug_category", r.bug_category},
          {"commits_until_fix", r.commits_until_fix},
          {"bug_score", r.bug_score},
          {"fix_score", r.fix_score}};
}

std::vector<CategoryRecord> load_categories(const std::filesystem::path& path) {
  std::vector<CategoryRecord> out;
  for_each_jsonl(
      path,
      [&](std::size_t line, const Json& rec) {
        try {
          CategoryRecord r;
          r.pair_id = rec.at("pair_id").get<std::string>();
          const auto cat = parse_category(rec.at("category").get<std::string>());
          if (!cat) throw SchemaError(line, "unknown exposure category");
          r.category = *cat;
          r.excluded = rec.value("excluded", false);
          r.bug_category = normalize_bug_category(rec.value("bug_category", std::string("OTHER")));
          r.commits_until_fix = rec.value("commits_until_fix", std::uint64_t{0});
          r.bug_score = rec.value("bug_score", 0.0);
          r.fix_score = rec.value("fix_score", 0.0);
          out.push_back(std::move(r));
        } catch (const Json::exception& e) {
          throw SchemaError(line, e.what());
        }
      },
      [&](std::size_t line, const std::string& msg) { throw SchemaError(line, msg); });
  return out;
}

std::map<std::string, ExposureCategory> category_map(std::span<const CategoryRecord> records) {
  std::map<std::string, ExposureCategory> out;
  for (const auto& r : records) {
    if (!r.excluded) out[r.pair_id] = r.category;
  }
  return out;
}

}  // namespace xprobe
