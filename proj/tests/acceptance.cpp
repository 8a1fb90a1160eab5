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

// Acceptance suite.  Each TEST is one criterion; the listener prints a
// single "[AC-N] PASS|FAIL" line per test after it finishes.

#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <unordered_set>
#include <vector>

#include "test_util.hpp"
#include "xprobe/canonical.hpp"
#include "xprobe/dataset.hpp"
#include "xprobe/genmatch.hpp"
#include "xprobe/io.hpp"
#include "xprobe/membership.hpp"
#include "xprobe/metrics.hpp"
#include "xprobe/pipeline.hpp"
#include "xprobe/portrait.hpp"
#include "xprobe/refmodel.hpp"
#include "xprobe/report.hpp"
#include "xprobe/synth.hpp"

namespace xprobe {
namespace {

namespace fs = std::filesystem;
using synth::Rng;
using testing::TempDir;

// Pinned tolerances and limits.
constexpr double kMaxMeasuredFpr = 0.002;
constexpr double kBloomSeconds = 60.0;
constexpr double kSumTolerance = 1e-9;
constexpr double kMetricRelTolerance = 1e-12;
constexpr double kMinBugPreference = 0.80;
constexpr double kDirectionalSeconds = 300.0;
// Characters of context for the directional run.  Synthetic Java lines
// start after an 8-space indent, which is all a default-order model sees.
constexpr std::size_t kDirectionalOrder = 24;
// Exact-oracle comparisons use a filter tight enough that a collision is
// not expected over the whole dataset.
constexpr double kOracleFpr = 1e-7;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

PortraitParams params_with(double fpr, std::uint64_t seed) {
  PortraitParams p;
  p.target_fpr = fpr;
  p.hash_seed = seed;
  return p;
}

PaddedQuery whole_query(std::string_view text) {
  const CanonicalStream s = canonicalize(text);
  PaddedQuery q;
  q.snippet = {0, s.size()};
  q.padded = q.snippet;
  q.sample_len = s.size();
  q.query_text = s.bytes();
  return q;
}

// Stored windows of a corpus, exactly as the build kernel sees them.
std::unordered_set<std::string> stored_windows(std::span<const Document> docs,
                                               const PortraitParams& params) {
  std::unordered_set<std::string> out;
  for (const auto& d : docs) {
    const CanonicalStream s = canonicalize(d.text);
    for (const auto& w : strided_windows(s, params)) out.emplace(w.text);
  }
  return out;
}

// Brute-force substring search: is any stored window a substring of the query?
bool oracle_seen(const std::vector<std::string>& windows, const std::string& query) {
  for (const auto& w : windows) {
    if (query.find(w) != std::string::npos) return true;
  }
  return false;
}

// Pair whose bug and fix are random token runs shorter than one window that
// differ in their first and last token, so no window can match both.
BugFixPair disjoint_pair(Rng& rng, const std::string& id, std::uint64_t commits = 0) {
  const std::string head = "class K" + std::to_string(rng.below(1000000)) + " {\n" +
                           synth::java_lines(rng, 6) + "        ";
  const std::string tail = "\n" + synth::java_lines(rng, 6) + "}\n";
  std::string bug = synth::random_tokens(rng, 20);
  std::string fix = synth::random_tokens(rng, 20);
  while (fix.front() == bug.front()) fix.front() = synth::random_tokens(rng, 1)[0];
  while (fix.back() == bug.back()) fix.back() = synth::random_tokens(rng, 1)[0];
  BugFixPair p;
  p.pair_id = id;
  p.bug_text = bug;
  p.fix_text = fix;
  p.context_before = head;
  p.commits_until_fix = commits;
  p.source_file_bug = head + bug + tail;
  p.source_file_fix = head + fix + tail;
  return p;
}

std::vector<Document> background(Rng& rng, std::size_t n) {
  std::vector<Document> docs;
  for (std::size_t i = 0; i < n; ++i) {
    docs.push_back({"bg" + std::to_string(i), synth::java_file(rng, 10 + rng.below(20))});
  }
  return docs;
}

void plant(Rng& rng, std::vector<Document>& docs, const BugFixPair& p, ExposureCategory c) {
  const bool bug = c == ExposureCategory::kBoth || c == ExposureCategory::kOnlyBug;
  const bool fix = c == ExposureCategory::kBoth || c == ExposureCategory::kOnlyFix;
  if (bug) docs.push_back(synth::embed(rng, p.pair_id + "-b", *p.source_file_bug, rng.below(120)));
  if (fix) docs.push_back(synth::embed(rng, p.pair_id + "-f", *p.source_file_fix, rng.below(120)));
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = read_file(e.path());
  }
  return out;
}

bool rel_close(double a, double b, double tol) {
  if (a == b) return true;
  return std::fabs(a - b) <= tol * std::max(std::fabs(a), std::fabs(b));
}

TEST(Acceptance, AC01_BloomFalsePositiveRate) {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(1001);
  PortraitParams params = params_with(0.001, 17);
  std::vector<Document> docs;
  for (int i = 0; i < 100; ++i) docs.push_back({"d" + std::to_string(i), synth::random_tokens(rng, 50000)});
  const Portrait portrait = build_portrait(docs, params);
  ASSERT_EQ(portrait.element_count(), 100000u);

  const auto members = stored_windows(docs, portrait.params());
  std::size_t false_negatives = 0;
  for (const auto& w : members) false_negatives += !portrait.contains(w);

  std::size_t probes = 0;
  std::size_t false_positives = 0;
  while (probes < 100000) {
    const std::string w = synth::random_tokens(rng, 50);
    if (members.count(w)) continue;
    ++probes;
    false_positives += portrait.contains(w);
  }
  const double fpr = static_cast<double>(false_positives) / static_cast<double>(probes);
  const double elapsed = seconds_since(t0);
  std::printf("  members=%zu false_negatives=%zu probes=%zu measured_fpr=%.5f elapsed=%.2fs\n",
              members.size(), false_negatives, probes, fpr, elapsed);
  EXPECT_EQ(false_negatives, 0u);
  EXPECT_LE(fpr, kMaxMeasuredFpr);
  EXPECT_LT(elapsed, kBloomSeconds);
}

TEST(Acceptance, AC02_MinimumQueryLength) {
  Rng rng(1002);
  const PortraitParams params = params_with(0.001, 3);
  std::vector<Document> docs;
  for (int i = 0; i < 1000; ++i) {
    docs.push_back({"doc" + std::to_string(i), synth::java_file(rng, 8 + rng.below(24))});
  }
  const Portrait portrait = build_portrait(docs, params);
  const std::size_t need = min_sound_length(portrait.params());
  ASSERT_EQ(need, 99u);

  std::size_t queries = 0;
  std::size_t misses = 0;
  std::size_t short_zero = 0;
  for (const auto& d : docs) {
    const CanonicalStream s = canonicalize(d.text);
    if (s.size() < need) continue;
    for (std::size_t b = 0; b + need <= s.size(); ++b) {
      const auto r = query_exposure(portrait, whole_query(s.slice(b, need)));
      ++queries;
      misses += r.hit_window_count == 0;
    }
    for (int k = 0; k < 20; ++k) {
      const std::size_t len = need + 1 + rng.below(s.size() - need + 1);
      if (len > s.size()) continue;
      const std::size_t b = rng.below(s.size() - len + 1);
      const auto r = query_exposure(portrait, whole_query(s.slice(b, len)));
      ++queries;
      misses += r.hit_window_count == 0;
    }
    // [1, 1 + need - 1) holds no stored window: those start at 0 and 50.
    const auto r = query_exposure(portrait, whole_query(s.slice(1, need - 1)));
    short_zero += r.hit_window_count == 0;
  }
  std::printf("  verbatim queries >= %zu tokens: %zu, zero-hit: %zu; %zu-token misses by design: %zu\n",
              need, queries, misses, need - 1, short_zero);
  EXPECT_EQ(misses, 0u);
  EXPECT_GE(short_zero, 1u);
}

TEST(Acceptance, AC03_PaddingBound) {
  bool all_ok = true;
  for (const std::size_t n : {10u, 39u, 80u}) {
    Rng rng(1003 + n);
    const std::string snippet = synth::random_tokens(rng, n);
    const std::string right = synth::random_tokens(rng, 150);
    std::size_t worst = n;
    bool sizes_ok = true;
    bool every_alignment_hits = true;
    for (std::size_t a = 0; a < 50; ++a) {
      const std::string left = synth::random_tokens(rng, 150 + a);
      const Document doc{"align", left + snippet + right};
      const Portrait portrait = build_portrait(std::span(&doc, 1), params_with(kOracleFpr, a));
      const CanonicalStream s = canonicalize(doc.text);
      const PaddedQuery q = pad_query(s, {left.size(), left.size() + n}, portrait.params());
      sizes_ok &= q.padded.size() == 99 && !q.unsound;
      const std::size_t sb = q.snippet.begin - q.padded.begin;
      const std::size_t se = sb + n;
      const auto hits = hit_positions(portrait, canonicalize(q.query_text));
      every_alignment_hits &= !hits.empty();
      for (std::size_t p : hits) {
        const std::size_t lo = std::max(p, sb);
        const std::size_t hi = std::min(p + 50, se);
        worst = std::min(worst, hi > lo ? hi - lo : 0);
      }
    }
    const std::size_t required = (99 - n + 1) / 2;
    const bool ok = sizes_ok && every_alignment_hits && worst >= required;
    std::printf("  sample_len=%zu padded=99:%s worst_overlap=%zu required=%zu -> %s\n", n,
                sizes_ok ? "yes" : "no", worst, required, ok ? "ok" : "below bound");
    all_ok &= ok;
  }
  EXPECT_TRUE(all_ok);
}

TEST(Acceptance, AC04_ExposureScoreSemantics) {
  Rng rng(1004);
  const PortraitParams params = params_with(kOracleFpr, 5);

  // Misaligned duplicate: stored windows at query offsets 0 and 30.
  const std::string q = synth::random_tokens(rng, 99);
  const std::vector<Document> dup = {
      {"a", q + synth::random_tokens(rng, 30)},
      {"b", synth::random_tokens(rng, 20) + q + synth::random_tokens(rng, 30)}};
  const auto r_dup = query_exposure(build_portrait(dup, params), whole_query(q));
  std::printf("  duplicate: hits=%zu expected=%zu score=%.3f\n", r_dup.hit_window_count,
              r_dup.expected_aligned_count, r_dup.exposure_score);
  EXPECT_EQ(r_dup.exposure_score, 2.0);

  // Partial presence: every window of the mutated query covers token 45 or 94.
  std::vector<Document> partial;
  for (std::size_t a = 0; a < 50; ++a) {
    partial.push_back({"p" + std::to_string(a),
                       synth::random_tokens(rng, a) + q + synth::random_tokens(rng, 60)});
  }
  const Portrait pp = build_portrait(partial, params);
  std::string mutated = q;
  for (std::size_t i : {45u, 94u}) mutated[i] = mutated[i] == 'x' ? 'y' : 'x';
  const auto r_orig = query_exposure(pp, whole_query(q));
  const auto r_mut = query_exposure(pp, whole_query(mutated));
  std::printf("  partial: original score=%.3f mutated score=%.3f\n", r_orig.exposure_score,
              r_mut.exposure_score);
  EXPECT_GT(r_orig.exposure_score, 1.0);
  EXPECT_EQ(r_mut.exposure_score, 0.0);

  // 500-pair dataset against brute-force substring search.
  std::vector<BugFixPair> pairs;
  std::vector<Document> docs = background(rng, 200);
  for (int i = 0; i < 500; ++i) {
    pairs.push_back(synth::make_pair(rng, "pair" + std::to_string(i)));
    plant(rng, docs, pairs.back(), kAllCategories[rng.below(4)]);
  }
  const Portrait portrait = build_portrait(docs, params);
  const auto set = stored_windows(docs, portrait.params());
  const std::vector<std::string> windows(set.begin(), set.end());
  std::size_t agree = 0;
  std::size_t seen = 0;
  for (const auto& p : pairs) {
    const auto c = classify_pair(portrait, p);
    const bool ob = oracle_seen(windows, variant_query(p, Variant::kBug, portrait.params()).query_text);
    const bool of = oracle_seen(windows, variant_query(p, Variant::kFix, portrait.params()).query_text);
    agree += c.category == category_from_seen(ob, of);
    seen += c.bug.seen + c.fix.seen;
  }
  std::printf("  oracle agreement: %zu/500 (seen variants: %zu)\n", agree, seen);
  EXPECT_EQ(agree, 500u);
}

TEST(Acceptance, AC05_StratificationTruthTable) {
  Rng rng(1005);
  std::vector<BugFixPair> pairs;
  std::map<std::string, ExposureCategory> truth;
  std::vector<Document> docs = background(rng, 100);
  for (ExposureCategory c : kAllCategories) {
    for (int i = 0; i < 50; ++i) {
      const std::string id = std::string(category_id(c)) + "-" + std::to_string(i);
      pairs.push_back(disjoint_pair(rng, id, 1 + rng.below(100)));
      plant(rng, docs, pairs.back(), c);
      truth[id] = c;
    }
  }
  const Portrait portrait = build_portrait(docs, params_with(kOracleFpr, 11));
  std::vector<VariantExposure> reports;
  for (const auto& p : pairs) {
    for (Variant v : {Variant::kBug, Variant::kFix}) {
      reports.push_back({p.pair_id, v, query_exposure(portrait, variant_query(p, v, portrait.params()))});
    }
  }
  const StratifyResult strat = stratify(pairs, reports);
  std::size_t correct = 0;
  for (const auto& [id, c] : truth) {
    auto it = strat.categories.find(id);
    correct += it != strat.categories.end() && it->second == c;
  }
  const ExposureSummary summary = summarize_exposure(pairs, strat.categories);
  double sum = 0.0;
  for (const auto& row : summary.rows) sum += row.fraction;
  std::printf("  correct=%zu/200 excluded=%zu fraction_sum=%.12f\n%s", correct,
              strat.excluded.size(), sum, emit_exposure_table(summary).c_str());
  EXPECT_EQ(correct, 200u);
  EXPECT_NEAR(sum, 1.0, kSumTolerance);
}

TEST(Acceptance, AC06_MetricOracle) {
  Rng rng(1006);
  std::size_t disagreements = 0;
  std::size_t law_violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 1 + rng.below(300);
    std::vector<double> p(n);
    for (auto& x : p) {
      x = rng.below(10) == 0 ? std::pow(10.0, -1.0 - 11.0 * rng.uniform()) : 1.0 - rng.uniform();
    }
    const MetricVector m = metric_vector(p);

    double sum = 0.0;
    double logs = 0.0;
    double pairwise = 0.0;
    for (double a : p) {
      sum += a;
      logs += std::log(a);
      for (double b : p) pairwise += std::fabs(a - b);
    }
    const double nn = static_cast<double>(n);
    const double am = sum / nn;
    const double gm = std::exp(logs / nn);
    const double ppl = std::exp(-logs / nn);
    const double gini = pairwise / (2.0 * nn * nn * am);
    const double lo = *std::min_element(p.begin(), p.end());
    const double hi = *std::max_element(p.begin(), p.end());

    const bool agree = m.length == n && rel_close(m.arithmetic_mean, am, kMetricRelTolerance) &&
                       rel_close(m.geometric_mean, gm, kMetricRelTolerance) &&
                       rel_close(m.perplexity, ppl, kMetricRelTolerance) &&
                       (rel_close(m.gini, gini, kMetricRelTolerance) ||
                        std::fabs(m.gini - gini) <= kMetricRelTolerance) &&
                       m.min_prob == lo && m.max_prob == hi;
    disagreements += !agree;
    const double slack = 1.0 + kMetricRelTolerance;
    const bool laws = m.geometric_mean <= m.arithmetic_mean * slack &&
                      m.min_prob <= m.geometric_mean * slack &&
                      m.geometric_mean <= m.max_prob * slack &&
                      std::fabs(m.perplexity * m.geometric_mean - 1.0) <= kMetricRelTolerance;
    law_violations += !laws;
  }
  std::size_t nonzero_constant_gini = 0;
  for (int i = 0; i < 100; ++i) {
    const std::vector<double> c(1 + rng.below(200), 1.0 - rng.uniform());
    nonzero_constant_gini += metric_vector(c).gini != 0.0;
  }
  std::printf("  disagreements=%zu law_violations=%zu nonzero_constant_gini=%zu\n", disagreements,
              law_violations, nonzero_constant_gini);
  EXPECT_EQ(disagreements, 0u);
  EXPECT_EQ(law_violations, 0u);
  EXPECT_EQ(nonzero_constant_gini, 0u);
}

TEST(Acceptance, AC07_GenerationTruthTable) {
  Rng rng(1007);
  std::vector<MatchOutcome> outcomes;
  std::map<std::string, ExposureCategory> categories;
  std::size_t mismatches = 0;
  for (int i = 0; i < 400; ++i) {
    const BugFixPair p = synth::make_pair(rng, "g" + std::to_string(i));
    const bool want_bug = (i & 1) != 0;
    const bool want_fix = (i & 2) != 0;
    GenerationRecord g;
    g.pair_id = p.pair_id;
    for (std::size_t k = 0; k < kExpectedCompletions; ++k) g.completions.push_back("x = 1;\nmore();");
    if (want_bug) g.completions[rng.below(5)] = "  " + p.bug_text + "  \nnext();";
    if (want_fix) {
      std::size_t slot = rng.below(5);
      while (want_bug && trim(g.completions[slot]) != "x = 1;\nmore();") slot = (slot + 1) % 5;
      g.completions[slot] = p.fix_text + "\n}";
    }
    const MatchOutcome o = classify_outcome(g, p);
    mismatches += o.any_bug != want_bug || o.any_fix != want_fix ||
                  o.category != outcome_from_matches(want_bug, want_fix);
    outcomes.push_back(o);
    categories[p.pair_id] = kAllCategories[rng.below(4)];
  }
  const auto rates = outcome_rates(outcomes, categories);
  std::size_t bad_sums = 0;
  std::size_t total = 0;
  for (const auto& [c, r] : rates) {
    total += r.n;
    if (!r.fractions()) continue;
    double s = 0.0;
    for (double f : *r.fractions()) s += f;
    bad_sums += std::fabs(s - 1.0) > kSumTolerance;
  }
  std::printf("  records=%zu mismatches=%zu strata_with_bad_sum=%zu\n%s", outcomes.size(),
              mismatches, bad_sums, emit_generation_rates(rates).c_str());
  EXPECT_EQ(mismatches, 0u);
  EXPECT_EQ(bad_sums, 0u);
  EXPECT_EQ(total, outcomes.size());
  EXPECT_EQ(outcome_from_matches(false, false), Outcome::kNoBugNoFix);
  EXPECT_EQ(outcome_from_matches(true, false), Outcome::kBugWithoutFixes);
  EXPECT_EQ(outcome_from_matches(false, true), Outcome::kFixWithoutBugs);
  EXPECT_EQ(outcome_from_matches(true, true), Outcome::kMixBugFix);
}

TEST(Acceptance, AC08_DirectionalExposureEffect) {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(1008);
  std::vector<BugFixPair> pairs;
  std::map<std::string, ExposureCategory> strata;
  std::vector<Document> docs = background(rng, 300);
  for (int i = 0; i < 100; ++i) {
    const bool planted = i < 50;
    pairs.push_back(synth::make_pair(rng, (planted ? "planted" : "control") + std::to_string(i)));
    strata[pairs.back().pair_id] = planted ? ExposureCategory::kOnlyBug : ExposureCategory::kNeither;
    if (!planted) continue;
    for (int copy = 0; copy < 20; ++copy) {
      docs.push_back(synth::embed(rng, pairs.back().pair_id + "-" + std::to_string(copy),
                                  *pairs.back().source_file_bug, rng.below(80)));
    }
  }
  const auto bug_rates = [&](std::size_t order) {
    NGramModel::Options mo;
    mo.order = order;
    mo.seed = 77;
    NGramModel model = NGramModel::train(docs, mo);
    GenerateOptions go;
    go.seed = 78;
    const auto gens = generate_batch(model, pairs, go);
    std::vector<MatchOutcome> outcomes;
    for (std::size_t i = 0; i < pairs.size(); ++i) outcomes.push_back(classify_outcome(gens[i], pairs[i]));
    const auto rates = outcome_rates(outcomes, strata);
    const auto rate = [&](ExposureCategory c) {
      const auto f = rates.at(c).fractions();
      return f ? (*f)[1] : 0.0;
    };
    std::printf("  order %zu BugWithoutFixes rate: planted=%.2f control=%.2f\n", order,
                rate(ExposureCategory::kOnlyBug), rate(ExposureCategory::kNeither));
    return std::make_tuple(std::move(model), rate(ExposureCategory::kOnlyBug),
                           rate(ExposureCategory::kNeither));
  };
  bug_rates(NGramModel::Options{}.order);
  const auto [model, planted_rate, control_rate] = bug_rates(kDirectionalOrder);

  const auto seqs = score_batch(model, score_requests(pairs));
  const auto vecs = metric_vectors(seqs);
  std::map<std::pair<ExposureCategory, Metric>, std::array<std::size_t, 3>> dist;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const ExposureCategory c = strata[pairs[i].pair_id];
    for (Metric m : {Metric::kGeometricMean, Metric::kMinProb, Metric::kMaxProb}) {
      ++dist[{c, m}][static_cast<int>(prefer(vecs[2 * i], vecs[2 * i + 1], m))];
    }
  }
  const double elapsed = seconds_since(t0);
  const auto gm = dist[{ExposureCategory::kOnlyBug, Metric::kGeometricMean}];
  const double bug_share = static_cast<double>(gm[1]) / 50.0;
  for (const auto& [key, d] : dist) {
    std::printf("  %-8s %-15s fix=%zu bug=%zu tie=%zu\n", std::string(category_id(key.first)).c_str(),
                std::string(metric_name(key.second)).c_str(), d[0], d[1], d[2]);
  }
  std::printf("  geometric_mean prefers bug in %.0f%% of planted pairs; elapsed=%.1fs\n",
              100.0 * bug_share, elapsed);
  EXPECT_GT(planted_rate, control_rate);
  EXPECT_GE(bug_share, kMinBugPreference);
  EXPECT_LT(elapsed, kDirectionalSeconds);
}

TEST(Acceptance, AC09_RunDeterminism) {
  TempDir tmp("ac9");
  const fs::path config = fs::path(XPROBE_FIXTURE_DIR) / "config.json";
  ASSERT_TRUE(fs::exists(config));
  for (const char* dir : {"a", "b"}) {
    const std::string cmd = std::string("\"") + XPROBE_CLI + "\" run --config \"" + config.string() +
                            "\" --run-dir \"" + (tmp / dir).string() + "\" > /dev/null 2>&1";
    ASSERT_EQ(std::system(cmd.c_str()), 0) << cmd;
  }
  const auto a = read_tree(tmp / "a" / "report");
  const auto b = read_tree(tmp / "b" / "report");
  std::size_t differing = 0;
  for (const auto& [name, bytes] : a) {
    auto it = b.find(name);
    differing += it == b.end() || it->second != bytes;
  }
  std::printf("  report files: %zu vs %zu, differing: %zu\n", a.size(), b.size(), differing);
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a.size(), b.size());
  EXPECT_EQ(differing, 0u);
}

TEST(Acceptance, AC10_ExposureTableExemplar) {
  struct Row {
    ExposureCategory category;
    std::size_t count;
    std::uint64_t commits;
  };
  const std::vector<Row> rows = {{ExposureCategory::kNeither, 11286, 4735},
                                 {ExposureCategory::kBoth, 2169, 9328},
                                 {ExposureCategory::kOnlyBug, 1109, 14152},
                                 {ExposureCategory::kOnlyFix, 2335, 6373}};
  std::vector<Json> pair_lines;
  std::vector<Json> exposure_lines;
  std::size_t k = 0;
  for (const auto& r : rows) {
    const bool bug = r.category == ExposureCategory::kBoth || r.category == ExposureCategory::kOnlyBug;
    const bool fix = r.category == ExposureCategory::kBoth || r.category == ExposureCategory::kOnlyFix;
    for (std::size_t i = 0; i < r.count; ++i, ++k) {
      BugFixPair p;
      p.pair_id = "sstub" + std::to_string(k);
      p.bug_text = "a = b + " + std::to_string(k) + ";";
      p.fix_text = "a = b - " + std::to_string(k) + ";";
      p.commits_until_fix = r.commits;
      pair_lines.push_back(pair_to_json(p));
      for (Variant v : {Variant::kBug, Variant::kFix}) {
        ExposureReport rep;
        rep.seen = v == Variant::kBug ? bug : fix;
        rep.hit_window_count = rep.seen;
        rep.exposure_score = rep.seen ? 1.0 : 0.0;
        rep.coverage_fraction = rep.seen ? 0.5 : 0.0;
        exposure_lines.push_back(exposure_to_json({p.pair_id, v, rep}));
      }
    }
  }
  TempDir tmp("ac10");
  write_file(tmp / "pairs.jsonl", to_jsonl(pair_lines));
  write_file(tmp / "exposure.jsonl", to_jsonl(exposure_lines));
  stage_stratify(tmp / "pairs.jsonl", tmp / "exposure.jsonl", tmp / "categories.jsonl",
                 tmp / "table1.csv", false);
  const std::string expected =
      "Category,Count,#Commits,%\n"
      "Neither seen,11286,4735,67%\n"
      "Both seen,2169,9328,13%\n"
      "Only Bug,1109,14152,7%\n"
      "Only Fix,2335,6373,14%\n"
      "Total,16899,6169,\n";
  const std::string got = read_file(tmp / "table1.csv");
  std::printf("%s", got.c_str());
  EXPECT_EQ(got, expected);
}

class CriterionPrinter : public ::testing::EmptyTestEventListener {
 public:
  void OnTestEnd(const ::testing::TestInfo& info) override {
    const std::string name = info.name();
    const int n = std::atoi(name.substr(2, 2).c_str());
    const bool ok = info.result()->Passed();
    lines_.push_back("[AC-" + std::to_string(n) + "] " + (ok ? "PASS " : "FAIL ") + name.substr(5));
    std::printf("%s\n", lines_.back().c_str());
    std::fflush(stdout);
  }
  void OnTestProgramEnd(const ::testing::UnitTest&) override {
    std::printf("\nAcceptance summary\n");
    for (const auto& l : lines_) std::printf("%s\n", l.c_str());
  }

 private:
  std::vector<std::string> lines_;
};

}  // namespace
}  // namespace xprobe

int main(int argc, char** argv) {
  ::testing::InitGoogleTest(&argc, argv);
  ::testing::UnitTest::GetInstance()->listeners().Append(new xprobe::CriterionPrinter);
  return RUN_ALL_TESTS();
}
