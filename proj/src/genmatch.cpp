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

#include "xprobe/genmatch.hpp"

#include "xprobe/error.hpp"

namespace xprobe {

std::string_view outcome_id(Outcome o) {
  switch (o) {
    case Outcome::kFixWithoutBugs: return "FixWithoutBugs";
    case Outcome::kBugWithoutFixes: return "BugWithoutFixes";
    case Outcome::kMixBugFix: return "MixBugFix";
    case Outcome::kNoBugNoFix: return "NoBugNoFix";
  }
  return "NoBugNoFix";
}

std::optional<Outcome> parse_outcome(std::string_view s) {
  for (Outcome o : kAllOutcomes) {
    if (outcome_id(o) == s) return o;
  }
  return std::nullopt;
}

std::string_view outcome_label(Outcome o) {
  switch (o) {
    case Outcome::kFixWithoutBugs: return "Fix without bugs";
    case Outcome::kBugWithoutFixes: return "Bug without fixes";
    case Outcome::kMixBugFix: return "Mix bug-fix";
    case Outcome::kNoBugNoFix: return "No bug no fix";
  }
  return "No bug no fix";
}

std::string_view trim(std::string_view s) {
  constexpr std::string_view kSpace = " \t\r\n\f\v";
  const auto b = s.find_first_not_of(kSpace);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(kSpace);
  return s.substr(b, e - b + 1);
}

bool match_completion(std::string_view completion, std::string_view target, MatchMode mode) {
  const std::string_view want = trim(target);
  if (mode == MatchMode::kContains) {
    return !want.empty() && completion.find(want) != std::string_view::npos;
  }
  const auto nl = completion.find('\n');
  const std::string_view first = nl == std::string_view::npos ? completion : completion.substr(0, nl);
  return trim(first) == want;
}

MatchOutcome classify_outcome(const GenerationRecord& record, const BugFixPair& pair,
                              MatchMode mode) {
  MatchOutcome o;
  o.pair_id = record.pair_id;
  for (const auto& c : record.completions) {
    o.any_bug = o.any_bug || match_completion(c, pair.bug_text, mode);
    o.any_fix = o.any_fix || match_completion(c, pair.fix_text, mode);
  }
  o.category = outcome_from_matches(o.any_bug, o.any_fix);
  return o;
}

std::optional<std::array<double, 4>> OutcomeRates::fractions() const {
  if (n == 0) return std::nullopt;
  std::array<double, 4> f{};
  for (std::size_t i = 0; i < 4; ++i) f[i] = static_cast<double>(counts[i]) / static_cast<double>(n);
  return f;
}

std::map<ExposureCategory, OutcomeRates> outcome_rates(
    std::span<const MatchOutcome> outcomes,
    const std::map<std::string, ExposureCategory>& categories) {
  std::map<ExposureCategory, OutcomeRates> out;
  for (auto c : kAllCategories) out[c];
  for (const auto& o : outcomes) {
    const auto it = categories.find(o.pair_id);
    if (it == categories.end()) continue;
    OutcomeRates& r = out[it->second];
    ++r.counts[static_cast<std::size_t>(o.category)];
    ++r.n;
  }
  return out;
}

GenerationRecord generation_from_json(const Json& rec) {
  try {
    GenerationRecord g;
    g.pair_id = rec.at("pair_id").get<std::string>();
    g.completions = rec.at("completions").get<std::vector<std::string>>();
    if (g.completions.empty()) throw Error("completions must be non-empty");
    const Json& d = rec.at("decoding");
    g.decoding.temperature = d.at("temperature").get<double>();
    g.decoding.top_p = d.at("top_p").get<double>();
    g.decoding.max_new_tokens = d.at("max_new_tokens").get<std::size_t>();
    g.decoding.context_limit = d.at("context_limit").get<std::size_t>();
    return g;
  } catch (const Json::exception& e) {
    throw Error(std::string("malformed generation record: ") + e.what());
  }
}

Json generation_to_json(const GenerationRecord& g) {
  return {{"pair_id", g.pair_id},
          {"completions", g.completions},
          {"decoding",
           {{"temperature", g.decoding.temperature},
            {"top_p", g.decoding.top_p},
            {"max_new_tokens", g.decoding.max_new_tokens},
            {"context_limit", g.decoding.context_limit}}}};
}

std::vector<GenerationRecord> load_generations(const std::filesystem::path& path,
                                               std::size_t* off_count) {
  std::vector<GenerationRecord> out;
  for_each_jsonl(
      path,
      [&](std::size_t line, const Json& rec) {
        try {
          out.push_back(generation_from_json(rec));
        } catch (const Error& e) {
          throw SchemaError(line, e.what());
        }
        if (off_count && out.back().completions.size() != kExpectedCompletions) ++*off_count;
      },
      [&](std::size_t line, const std::string& msg) { throw SchemaError(line, msg); });
  return out;
}

Json outcome_to_json(const MatchOutcome& o) {
  return {{"pair_id", o.pair_id},
          {"any_bug", o.any_bug},
          {"any_fix", o.any_fix},
          {"category", outcome_id(o.category)}};
}

std::vector<MatchOutcome> load_outcomes(const std::filesystem::path& path) {
  std::vector<MatchOutcome> out;
  for_each_jsonl(
      path,
      [&](std::size_t line, const Json& rec) {
        try {
          MatchOutcome o;
          o.pair_id = rec.at("pair_id").get<std::string>();
          o.any_bug = rec.at("any_bug").get<bool>();
          o.any_fix = rec.at("any_fix").get<bool>();
          const auto cat = parse_outcome(rec.at("category").get<std::string>());
          if (!cat || *cat != outcome_from_matches(o.any_bug, o.any_fix)) {
            throw SchemaError(line, "category inconsistent with any_bug/any_fix");
          }
          o.category = *cat;
          out.push_back(std::move(o));
        } catch (const Json::exception& e) {
          throw SchemaError(line, e.what());
        }
      },
      [&](std::size_t line, const std::string& msg) { throw SchemaError(line, msg); });
  return out;
}

}  // namespace xprobe
