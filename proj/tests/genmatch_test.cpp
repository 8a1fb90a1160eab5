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

#include <gtest/gtest.h>

#include <algorithm>

#include "test_util.hpp"
#include "xprobe/error.hpp"
#include "xprobe/io.hpp"

namespace xprobe {
namespace {

// Independent oracle for the default mode: cut at the first '\n', strip
// ASCII whitespace on both ends of both strings, compare bytes.
bool oracle_match(std::string completion, std::string target) {
  completion = completion.substr(0, completion.find('\n'));
  auto strip = [](std::string s) {
    const char* ws = " \t\r\n\f\v";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string::npos) return std::string();
    return s.substr(b, s.find_last_not_of(ws) - b + 1);
  };
  return strip(completion) == strip(target);
}

BugFixPair pair() {
  BugFixPair p;
  p.pair_id = "p";
  p.bug_text = "return x + 1;";
  p.fix_text = "return x - 1;";
  return p;
}

GenerationRecord record(std::vector<std::string> completions) {
  GenerationRecord g;
  g.pair_id = "p";
  g.completions = std::move(completions);
  return g;
}

TEST(MatchCompletion, Examples) {
  EXPECT_TRUE(match_completion("return x + 1;\nint y = 2;", "return x + 1;"));
  EXPECT_FALSE(match_completion("return x - 1;", "return x + 1;"));
  EXPECT_TRUE(match_completion("  return x + 1;  ", "return x + 1;"));
  EXPECT_FALSE(match_completion("return x + 1; // done", "return x + 1;"));
  EXPECT_TRUE(match_completion("foo();\n  return x + 1; //", "return x + 1;", MatchMode::kContains));
  EXPECT_FALSE(match_completion("foo();\n  return x + 1;", "return x + 1;"));
}

TEST(MatchCompletion, AgreesWithTrimOracle) {
  const std::vector<std::string> pieces = {"return x + 1;", " ", "\t", "\n", "x", "\r", ";", "  return x + 1;"};
  const std::string target = "  return x + 1;\t";
  // Every concatenation of up to three pieces.
  for (const auto& a : pieces) {
    for (const auto& b : pieces) {
      for (const auto& c : pieces) {
        const std::string s = a + b + c;
        EXPECT_EQ(match_completion(s, target), oracle_match(s, target)) << "[" << s << "]";
      }
    }
  }
}

TEST(ClassifyOutcome, TruthTable) {
  const BugFixPair p = pair();
  EXPECT_EQ(classify_outcome(record({"return x + 1;", "z"}), p).category, Outcome::kBugWithoutFixes);
  EXPECT_EQ(classify_outcome(record({"return x - 1;"}), p).category, Outcome::kFixWithoutBugs);
  EXPECT_EQ(classify_outcome(record({"return x + 1;", "return x - 1;"}), p).category, Outcome::kMixBugFix);
  EXPECT_EQ(classify_outcome(record({"a", "b", "c", "d", "e"}), p).category, Outcome::kNoBugNoFix);
  EXPECT_EQ(outcome_from_matches(false, false), Outcome::kNoBugNoFix);
  EXPECT_EQ(outcome_from_matches(true, true), Outcome::kMixBugFix);
}

TEST(ClassifyOutcome, PermutationInvariant) {
  const BugFixPair p = pair();
  std::vector<std::string> c = {"a", "return x + 1;", "b", "return x - 1;\nmore", "c"};
  std::sort(c.begin(), c.end());
  const Outcome first = classify_outcome(record(c), p).category;
  do {
    EXPECT_EQ(classify_outcome(record(c), p).category, first);
  } while (std::next_permutation(c.begin(), c.end()));
}

TEST(OutcomeRates, FractionsPerStratum) {
  std::map<std::string, ExposureCategory> cats;
  std::vector<MatchOutcome> outcomes;
  for (int i = 0; i < 4; ++i) {
    const std::string id = "p" + std::to_string(i);
    cats[id] = ExposureCategory::kBoth;
    outcomes.push_back({id, false, false, kAllOutcomes[i]});
    cats["n" + std::to_string(i)] = ExposureCategory::kNeither;
    outcomes.push_back({"n" + std::to_string(i), false, false, Outcome::kNoBugNoFix});
  }
  outcomes.push_back({"unknown", true, false, Outcome::kBugWithoutFixes});
  const auto rates = outcome_rates(outcomes, cats);
  ASSERT_EQ(rates.size(), 4u);
  const auto both = *rates.at(ExposureCategory::kBoth).fractions();
  for (double f : both) EXPECT_DOUBLE_EQ(f, 0.25);
  const auto neither = *rates.at(ExposureCategory::kNeither).fractions();
  EXPECT_EQ(neither, (std::array<double, 4>{0, 0, 0, 1}));
  EXPECT_FALSE(rates.at(ExposureCategory::kOnlyBug).fractions().has_value());
  for (const auto& [cat, r] : rates) {
    if (auto f = r.fractions()) EXPECT_NEAR(f->at(0) + f->at(1) + f->at(2) + f->at(3), 1.0, 1e-9);
  }
}

TEST(Generations, WireFormatAndOffCount) {
  testing::TempDir dir("gen");
  GenerationRecord five = record({"a", "b", "c", "d", "e"});
  five.decoding.temperature = 0.5;
  GenerationRecord three = record({"a", "b", "c"});
  three.pair_id = "q";
  write_file(dir / "g.jsonl", to_jsonl(std::vector<Json>{generation_to_json(five), generation_to_json(three)}));
  std::size_t off = 0;
  const auto back = load_generations(dir / "g.jsonl", &off);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(off, 1u);
  EXPECT_EQ(back[0].decoding, five.decoding);
  EXPECT_EQ(back[1].completions.size(), 3u);
  EXPECT_THROW(generation_from_json(Json{{"pair_id", "x"}}), Error);
}

TEST(Outcomes, RoundTripValidatesConsistency) {
  testing::TempDir dir("out");
  const MatchOutcome o{"p", true, true, Outcome::kMixBugFix};
  write_file(dir / "o.jsonl", to_jsonl(std::vector<Json>{outcome_to_json(o)}));
  EXPECT_EQ(load_outcomes(dir / "o.jsonl")[0].category, Outcome::kMixBugFix);
  Json bad = outcome_to_json(o);
  bad["category"] = "NoBugNoFix";
  write_file(dir / "bad.jsonl", bad.dump() + "\n");
  EXPECT_THROW(load_outcomes(dir / "bad.jsonl"), Error);
}

}  // namespace
}  // namespace xprobe
