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
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "xprobe/io.hpp"
#include "xprobe/pair.hpp"

namespace xprobe {

struct DecodingParams {
  double temperature = 0.8;
  double top_p = 0.95;
  std::size_t max_new_tokens = 64;
  std::size_t context_limit = 2048;

  friend bool operator==(const DecodingParams&, const DecodingParams&) = default;
};

inline constexpr std::size_t kExpectedCompletions = 5;

struct GenerationRecord {
  std::string pair_id;
  std::vector<std::string> completions;
  DecodingParams decoding;
};

enum class Outcome { kFixWithoutBugs, kBugWithoutFixes, kMixBugFix, kNoBugNoFix };

inline constexpr std::array<Outcome, 4> kAllOutcomes = {
    Outcome::kFixWithoutBugs, Outcome::kBugWithoutFixes, Outcome::kMixBugFix,
    Outcome::kNoBugNoFix};

std::string_view outcome_id(Outcome o);  // "FixWithoutBugs", ...
std::optional<Outcome> parse_outcome(std::string_view s);
std::string_view outcome_label(Outcome o);  // "Fix without bugs", ...

constexpr Outcome outcome_from_matches(bool any_bug, bool any_fix) {
  if (any_bug && any_fix) return Outcome::kMixBugFix;
  if (any_bug) return Outcome::kBugWithoutFixes;
  if (any_fix) return Outcome::kFixWithoutBugs;
  return Outcome::kNoBugNoFix;
}

struct MatchOutcome {
  std::string pair_id;
  bool any_bug = false;
  bool any_fix = false;
  Outcome category = Outcome::kNoBugNoFix;
};

enum class MatchMode {
  // First line of the completion, trimmed, equals the trimmed target.
  kExactFirstLine,
  // Trimmed target occurs anywhere in the completion.
  kContains,
};

// Leading/trailing ASCII whitespace removed.
std::string_view trim(std::string_view s);

bool match_completion(std::string_view completion, std::string_view target,
                      MatchMode mode = MatchMode::kExactFirstLine);

MatchOutcome classify_outcome(const GenerationRecord& record, const BugFixPair& pair,
                              MatchMode mode = MatchMode::kExactFirstLine);

struct OutcomeRates {
  std::array<std::size_t, 4> counts{};  // in kAllOutcomes order
  std::size_t n = 0;
  // Empty for an empty stratum.
  std::optional<std::array<double, 4>> fractions() const;
};

// Outcomes whose pair has no category are skipped.  Every category has an
// entry, possibly with n == 0.
std::map<ExposureCategory, OutcomeRates> outcome_rates(
    std::span<const MatchOutcome> outcomes,
    const std::map<std::string, ExposureCategory>& categories);

// generations.jsonl: {"pair_id", "completions": [...], "decoding": {...}}.
GenerationRecord generation_from_json(const Json& rec);  // throws Error
Json generation_to_json(const GenerationRecord& g);
// `off_count` receives the number of records without exactly 5 completions.
std::vector<GenerationRecord> load_generations(const std::filesystem::path& path,
                                               std::size_t* off_count = nullptr);

Json outcome_to_json(const MatchOutcome& o);
std::vector<MatchOutcome> load_outcomes(const std::filesystem::path& path);

}  // namespace xprobe
