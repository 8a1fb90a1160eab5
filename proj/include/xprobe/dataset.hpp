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

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "xprobe/io.hpp"
#include "xprobe/membership.hpp"
#include "xprobe/pair.hpp"

namespace xprobe {

struct RecordDiagnostic {
  std::size_t line = 0;
  std::string message;
};

struct PairLoadResult {
  std::vector<BugFixPair> pairs;
  std::vector<RecordDiagnostic> rejected;
};

// Parses one pairs.jsonl record.  Records carrying the public ManySStuBs4J
// field names (sourceBeforeFix, sourceAfterFix, bugType, ...) are mapped
// onto the native schema.  Returns an error message on schema violations.
std::variant<BugFixPair, std::string> parse_pair_record(const Json& record);

// Valid records are returned, malformed ones and repeated pair_ids (first
// occurrence wins) land in `rejected`.  Throws IoError on unreadable files
// and Error when no valid record remains.
PairLoadResult load_pairs(const std::filesystem::path& path);

Json pair_to_json(const BugFixPair& pair);

struct VariantExposure {
  std::string pair_id;
  Variant variant = Variant::kBug;
  ExposureReport report;
};

Json exposure_to_json(const VariantExposure& e);
VariantExposure exposure_from_json(const Json& record);  // throws Error
std::vector<VariantExposure> load_exposure(const std::filesystem::path& path);

struct StratifyResult {
  std::map<std::string, ExposureCategory> categories;
  // Pairs with an unsound variant, left out unless include_unsound is set.
  std::vector<std::string> excluded;
};

// Truth-table assignment for every pair.  Throws Error when a pair is
// missing the report of either variant.
StratifyResult stratify(std::span<const BugFixPair> pairs, std::span<const VariantExposure> reports,
                        bool include_unsound = false);

struct ExposureRow {
  ExposureCategory category = ExposureCategory::kNeither;
  std::size_t count = 0;
  double fraction = 0.0;
  std::optional<double> mean_commits;  // empty for an empty category
};

struct ExposureSummary {
  std::array<ExposureRow, 4> rows;  // in kAllCategories order
  std::size_t total = 0;
  std::optional<double> mean_commits;
};

// Pairs absent from `categories` are ignored.
ExposureSummary summarize_exposure(std::span<const BugFixPair> pairs,
                                   const std::map<std::string, ExposureCategory>& categories);

struct BalancedSample {
  std::map<ExposureCategory, std::vector<std::string>> pair_ids;
  std::vector<std::string> warnings;
};

// Uniform sampling without replacement of `per_category_n` pairs from each
// category.  Members are ranked by a seeded hash of their pair_id and the
// lowest ranks are kept, so the subset depends only on (seed, membership),
// not on input order or platform.  Short categories are returned whole with
// a warning.
BalancedSample sample_balanced(const std::map<std::string, ExposureCategory>& categories,
                               std::size_t per_category_n, std::uint64_t seed);

// categories.jsonl: {"pair_id", "category", "excluded", "bug_category",
// "commits_until_fix", "bug_score", "fix_score"}.
struct CategoryRecord {
  std::string pair_id;
  ExposureCategory category = ExposureCategory::kNeither;
  bool excluded = false;
  std::string bug_category = "OTHER";
  std::uint64_t commits_until_fix = 0;
  double bug_score = 0.0;
  double fix_score = 0.0;
};

Json category_to_json(const CategoryRecord& r);
std::vector<CategoryRecord> load_categories(const std::filesystem::path& path);

// Category map over the non-excluded records.
std::map<std::string, ExposureCategory> category_map(std::span<const CategoryRecord> records);

}  // namespace xprobe
