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

#include "xprobe/metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_util.hpp"
#include "xprobe/error.hpp"
#include "xprobe/io.hpp"

namespace xprobe {
namespace {

MetricVector mv(std::vector<double> p) { return metric_vector(std::span<const double>(p)); }

// Naive re-evaluation straight from the definitions, in long double.
struct Naive {
  long double perplexity, gm, am, gini, lo, hi;
};

Naive naive(const std::vector<double>& p) {
  const long double n = static_cast<long double>(p.size());
  long double prod = 1.0L, sum = 0.0L, pair = 0.0L;
  long double lo = p[0], hi = p[0];
  for (double x : p) {
    prod *= x;
    sum += x;
    lo = std::min<long double>(lo, x);
    hi = std::max<long double>(hi, x);
  }
  for (double a : p) {
    for (double b : p) pair += std::fabs(static_cast<long double>(a) - b);
  }
  const long double mean = sum / n;
  return {std::pow(prod, -1.0L / n), std::pow(prod, 1.0L / n), mean, pair / (2.0L * n * n * mean), lo, hi};
}

std::vector<std::vector<double>> random_sequences(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t n = 1 + rng() % 64;
    std::vector<double> p(n);
    for (auto& x : p) x = static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
    out.push_back(std::move(p));
  }
  return out;
}

double rel(long double got, long double want) {
  if (want == 0.0L) return static_cast<double>(std::fabs(got));
  return static_cast<double>(std::fabs(got - want) / std::fabs(want));
}

TEST(MetricVector, Examples) {
  const MetricVector a = mv({0.5, 0.5});
  EXPECT_DOUBLE_EQ(a.perplexity, 2.0);
  EXPECT_DOUBLE_EQ(a.geometric_mean, 0.5);
  EXPECT_EQ(a.gini, 0.0);

  const MetricVector b = mv({0.25, 1.0});
  EXPECT_DOUBLE_EQ(b.geometric_mean, 0.5);
  EXPECT_DOUBLE_EQ(b.arithmetic_mean, 0.625);
  EXPECT_EQ(b.min_prob, 0.25);
  EXPECT_EQ(b.max_prob, 1.0);
  EXPECT_EQ(b.length, 2u);

  // (|0.1 - 0.3| * 2) / (2 * 4 * 0.2)
  EXPECT_NEAR(mv({0.1, 0.3}).gini, 0.25, 1e-15);
}

TEST(MetricVector, Errors) {
  EXPECT_THROW(mv({}), LengthError);
  EXPECT_THROW(mv({0.5, 0.0}), DomainError);
  EXPECT_THROW(mv({1.5}), DomainError);
  EXPECT_THROW(mv({std::nan("")}), DomainError);
  TokenProbSequence seq{"p", Variant::kBug, {"a", "b"}, {0.5}};
  EXPECT_THROW(metric_vector(seq), LengthError);
}

TEST(MetricVector, NaiveOracleProperty) {
  for (const auto& p : random_sequences(1000, 17)) {
    const MetricVector m = mv(p);
    const Naive o = naive(p);
    EXPECT_LE(rel(m.perplexity, o.perplexity), 1e-12);
    EXPECT_LE(rel(m.geometric_mean, o.gm), 1e-12);
    EXPECT_LE(rel(m.arithmetic_mean, o.am), 1e-12);
    EXPECT_LE(rel(m.gini, o.gini), 1e-12);
    EXPECT_EQ(m.min_prob, static_cast<double>(o.lo));
    EXPECT_EQ(m.max_prob, static_cast<double>(o.hi));
    EXPECT_EQ(m.length, p.size());
    EXPECT_LE(m.geometric_mean, m.arithmetic_mean);
    EXPECT_LE(m.min_prob, m.geometric_mean);
    EXPECT_LE(m.geometric_mean, m.max_prob);
    EXPECT_NEAR(m.perplexity * m.geometric_mean, 1.0, 1e-12);
  }
}

TEST(MetricVector, GiniScaleFreeAndZeroIffConstant) {
  std::mt19937_64 rng(3);
  for (const auto& p : random_sequences(200, 23)) {
    std::vector<double> scaled = p;
    const double c = 0.25 + 0.5 * static_cast<double>(rng() % 1000) / 1000.0;
    for (auto& x : scaled) x *= c;
    EXPECT_NEAR(mv(scaled).gini, mv(p).gini, 1e-12 * std::max(1.0, mv(p).gini));
  }
  for (double v : {1.0, 0.3, 1e-9}) {
    for (std::size_t n : {1u, 2u, 7u, 64u}) EXPECT_EQ(mv(std::vector<double>(n, v)).gini, 0.0);
  }
  EXPECT_GT(mv({0.3, 0.3, 0.30000000001}).gini, 0.0);
}

TEST(Prefer, Orientation) {
  MetricVector bug, fix;
  bug.arithmetic_mean = 0.4;
  fix.arithmetic_mean = 0.6;
  EXPECT_EQ(prefer(bug, fix, Metric::kArithmeticMean), Preferred::kFix);
  bug.perplexity = 2.0;
  fix.perplexity = 3.0;
  EXPECT_EQ(prefer(bug, fix, "perplexity"), Preferred::kBug);
  bug.geometric_mean = fix.geometric_mean = 0.7;
  EXPECT_EQ(prefer(bug, fix, Metric::kGeometricMean), Preferred::kTie);
  EXPECT_THROW(prefer(bug, fix, "entropy"), DomainError);
  EXPECT_TRUE(higher_is_preferred(Metric::kMinProb));
  EXPECT_FALSE(higher_is_preferred(Metric::kGini));
}

TEST(Prefer, AntisymmetricProperty) {
  const auto seqs = random_sequences(400, 29);
  for (std::size_t i = 0; i + 1 < seqs.size(); i += 2) {
    const MetricVector a = mv(seqs[i]);
    const MetricVector b = mv(seqs[i + 1]);
    for (Metric m : kAllMetrics) {
      const Preferred ab = prefer(a, b, m);
      const Preferred ba = prefer(b, a, m);
      if (ab == Preferred::kTie) {
        EXPECT_EQ(ba, Preferred::kTie);
      } else {
        EXPECT_NE(ab, ba);
        EXPECT_NE(ba, Preferred::kTie);
      }
      EXPECT_EQ(prefer(a, a, m), Preferred::kTie);
    }
  }
}

std::map<std::string, ExposureCategory> one_category(std::size_t n, ExposureCategory c) {
  std::map<std::string, ExposureCategory> m;
  for (std::size_t i = 0; i < n; ++i) m["p" + std::to_string(i)] = c;
  return m;
}

TEST(PreferenceCell, CountsAndFractions) {
  const auto cats = one_category(110, ExposureCategory::kOnlyBug);
  std::vector<PreferenceVerdict> v;
  for (std::size_t i = 0; i < 110; ++i) {
    const Preferred p = i < 60 ? Preferred::kFix : i < 100 ? Preferred::kBug : Preferred::kTie;
    v.push_back({"p" + std::to_string(i), Metric::kMinProb, p});
    v.push_back({"p" + std::to_string(i), Metric::kMaxProb, Preferred::kFix});
  }
  const PreferenceCell c = preference_cell(v, cats, ExposureCategory::kOnlyBug, Metric::kMinProb);
  EXPECT_EQ(c.fix, 60u);
  EXPECT_EQ(c.bug, 40u);
  EXPECT_EQ(c.ties, 10u);
  EXPECT_DOUBLE_EQ(*c.fix_fraction(), 0.6);
  EXPECT_DOUBLE_EQ(*c.bug_fraction(), 0.4);

  const auto table = preference_table(v, cats, ExposureCategory::kOnlyBug);
  EXPECT_DOUBLE_EQ(*table.at(Metric::kMaxProb).fix_fraction(), 1.0);
  EXPECT_DOUBLE_EQ(*table.at(Metric::kMaxProb).bug_fraction(), 0.0);
  EXPECT_FALSE(table.at(Metric::kGini).fix_fraction().has_value());
  EXPECT_EQ(preference_cell(v, cats, ExposureCategory::kOnlyFix, Metric::kMinProb).n(), 0u);

  const std::vector<std::string> subset = {"p0", "p99"};
  const PreferenceCell s =
      preference_cell(v, cats, ExposureCategory::kOnlyBug, Metric::kMinProb, &subset);
  EXPECT_EQ(s.fix, 1u);
  EXPECT_EQ(s.bug, 1u);
}

TEST(TokenProbs, WireFormat) {
  std::size_t clamped = 0;
  const Json probs = {{"pair_id", "a"}, {"variant", "bug"}, {"tokens", {"x", "y"}}, {"probs", {0.5, 0.0}}};
  const TokenProbSequence s = tokenprobs_from_json(probs, {}, &clamped);
  EXPECT_EQ(clamped, 1u);
  EXPECT_EQ(s.probs[1], 1e-12);

  const Json logs = {{"pair_id", "a"}, {"variant", "fix"}, {"tokens", {"x"}}, {"logprobs", {std::log(0.25)}}};
  EXPECT_NEAR(tokenprobs_from_json(logs, {}).probs[0], 0.25, 1e-15);

  Json both = probs;
  both["logprobs"] = {0.0, 0.0};
  EXPECT_THROW(tokenprobs_from_json(both, {}), Error);
  Json neither = probs;
  neither.erase("probs");
  EXPECT_THROW(tokenprobs_from_json(neither, {}), Error);
  Json mismatch = probs;
  mismatch["tokens"] = {"x"};
  EXPECT_THROW(tokenprobs_from_json(mismatch, {}), Error);

  TokenProbSequence t{"q", Variant::kFix, {"a", "b"}, {0.25, 0.75}};
  const TokenProbSequence back = tokenprobs_from_json(tokenprobs_to_json(t), {});
  EXPECT_EQ(back.probs, t.probs);
  EXPECT_EQ(back.tokens, t.tokens);
  EXPECT_EQ(back.variant, Variant::kFix);
}

TEST(TokenProbs, LoadReportsRecordNumber) {
  testing::TempDir dir("tp");
  write_file(dir / "t.jsonl",
             "{\"pair_id\":\"a\",\"variant\":\"bug\",\"tokens\":[\"x\"],\"probs\":[0.5]}\n"
             "{\"pair_id\":\"a\",\"variant\":\"bogus\",\"tokens\":[\"x\"],\"probs\":[0.5]}\n");
  try {
    load_tokenprobs(dir / "t.jsonl");
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Verdicts, RoundTrip) {
  testing::TempDir dir("v");
  const PreferenceVerdict v{"p", Metric::kGini, Preferred::kBug};
  write_file(dir / "v.jsonl", to_jsonl(std::vector<Json>{verdict_to_json(v)}));
  const auto back = load_verdicts(dir / "v.jsonl");
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].metric, Metric::kGini);
  EXPECT_EQ(back[0].preferred, Preferred::kBug);
  for (Metric m : kAllMetrics) EXPECT_EQ(parse_metric(metric_name(m)), m);
}

}  // namespace
}  // namespace xprobe
