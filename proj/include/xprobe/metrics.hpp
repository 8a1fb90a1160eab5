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

// Conditional probabilities of the tokens of one variant given the shared
// preceding context.
struct TokenProbSequence {
  std::string pair_id;
  Variant variant = Variant::kBug;
  std::vector<std::string> tokens;
  std::vector<double> probs;
};

enum class Metric {
  kLength,
  kPerplexity,
  kMinProb,
  kMaxProb,
  kGini,
  kGeometricMean,
  kArithmeticMean,
};

inline constexpr std::array<Metric, 7> kAllMetrics = {
    Metric::kLength, Metric::kPerplexity,    Metric::kMinProb,       Metric::kMaxProb,
    Metric::kGini,   Metric::kGeometricMean, Metric::kArithmeticMean};

std::string_view metric_name(Metric m);
// Throws DomainError on an unknown name.
Metric parse_metric(std::string_view name);

// true when a larger value means the variant is preferred.
constexpr bool higher_is_preferred(Metric m) {
  return m != Metric::kPerplexity && m != Metric::kGini;
}

struct MetricVector {
  std::size_t length = 0;
  double perplexity = 1.0;
  double min_prob = 1.0;
  double max_prob = 1.0;
  double gini = 0.0;
  double geometric_mean = 1.0;
  double arithmetic_mean = 1.0;

  double get(Metric m) const;
};

// Throws LengthError on an empty sequence or |tokens| != |probs|, and
// DomainError when a probability lies outside (0, 1].
//   perplexity = exp(-mean ln p), geometric mean = exp(mean ln p),
//   gini = sum_ij |p_i - p_j| / (2 n^2 mean p)  (0 for n == 1).
MetricVector metric_vector(const TokenProbSequence& seq);
MetricVector metric_vector(std::span<const double> probs);

// OpenMP over sequences.
std::vector<MetricVector> metric_vectors(std::span<const TokenProbSequence> seqs);

enum class Preferred { kFix, kBug, kTie };
std::string_view preferred_name(Preferred p);  // "fix" / "bug" / "tie"
std::optional<Preferred> parse_preferred(std::string_view s);

struct PreferenceVerdict {
  std::string pair_id;
  Metric metric = Metric::kLength;
  Preferred preferred = Preferred::kTie;
};

Preferred prefer(const MetricVector& bug, const MetricVector& fix, Metric metric);
// Throws DomainError for an unknown metric name.
Preferred prefer(const MetricVector& bug, const MetricVector& fix, std::string_view metric_name);

struct PreferenceCell {
  std::size_t fix = 0;
  std::size_t bug = 0;
  std::size_t ties = 0;
  std::size_t n() const { return fix + bug + ties; }
  // Over non-tie verdicts; empty when no non-tie verdict exists.
  std::optional<double> fix_fraction() const;
  std::optional<double> bug_fraction() const;
};

// Verdicts of `metric` for pairs whose category equals `condition`.  When
// `subset` is given only those pair ids are counted.
PreferenceCell preference_cell(std::span<const PreferenceVerdict> verdicts,
                               const std::map<std::string, ExposureCategory>& categories,
                               ExposureCategory condition, Metric metric,
                               const std::vector<std::string>* subset = nullptr);

// One cell per metric.
std::map<Metric, PreferenceCell> preference_table(
    std::span<const PreferenceVerdict> verdicts,
    const std::map<std::string, ExposureCategory>& categories, ExposureCategory condition,
    const std::vector<std::string>* subset = nullptr);

// Wire format: {"pair_id", "variant", "tokens": [...], "probs" | "logprobs": [...]}.
// Zero probabilities (and -inf log-probabilities written as null) are
// clamped to `zero_floor`; `clamped` counts them.
struct TokenProbLoadOptions {
  double zero_floor = 1e-12;
};
TokenProbSequence tokenprobs_from_json(const Json& rec, const TokenProbLoadOptions& opts,
                                       std::size_t* clamped = nullptr);
Json tokenprobs_to_json(const TokenProbSequence& seq);
std::vector<TokenProbSequence> load_tokenprobs(const std::filesystem::path& path,
                                               const TokenProbLoadOptions& opts = {},
                                               std::size_t* clamped = nullptr);

Json metric_vector_to_json(const std::string& pair_id, Variant v, const MetricVector& m);
Json verdict_to_json(const PreferenceVerdict& v);
std::vector<PreferenceVerdict> load_verdicts(const std::filesystem::path& path);

}  // namespace xprobe
