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

#include <algorithm>
#include <cmath>
#include <set>

#include "xprobe/error.hpp"
#include "xprobe/parallel.hpp"

namespace xprobe {

std::string_view metric_name(Metric m) {
  switch (m) {
    case Metric::kLength: return "length";
    case Metric::kPerplexity: return "perplexity";
    case Metric::kMinProb: return "min_prob";
    case Metric::kMaxProb: return "max_prob";
    case Metric::kGini: return "gini";
    case Metric::kGeometricMean: return "geometric_mean";
    case Metric::kArithmeticMean: return "arithmetic_mean";
  }
  return "length";
}

Metric parse_metric(std::string_view name) {
  for (Metric m : kAllMetrics) {
    if (metric_name(m) == name) return m;
  }
  throw DomainError("unknown metric \"" + std::string(name) + "\"");
}

double MetricVector::get(Metric m) const {
  switch (m) {
    case Metric::kLength: return static_cast<double>(length);
    case Metric::kPerplexity: return perplexity;
    case Metric::kMinProb: return min_prob;
    case Metric::kMaxProb: return max_prob;
    case Metric::kGini: return gini;
    case Metric::kGeometricMean: return geometric_mean;
    case Metric::kArithmeticMean: return arithmetic_mean;
  }
  return 0.0;
}

MetricVector metric_vector(std::span<const double> probs) {
  if (probs.empty()) throw LengthError("token probability sequence is empty");
  const std::size_t n = probs.size();
  double sum = 0.0;
  double log_sum = 0.0;
  double lo = probs[0];
  double hi = probs[0];
  for (double p : probs) {
    if (!(p > 0.0 && p <= 1.0)) {
      throw DomainError("token probability " + std::to_string(p) + " outside (0, 1]");
    }
    sum += p;
    log_sum += std::log(p);
    lo = std::min(lo, p);
    hi = std::max(hi, p);
  }
  MetricVector m;
  m.length = n;
  m.min_prob = lo;
  m.max_prob = hi;
  m.arithmetic_mean = sum / static_cast<double>(n);
  const double mean_log = log_sum / static_cast<double>(n);
  m.geometric_mean = std::exp(mean_log);
  m.perplexity = std::exp(-mean_log);
  // Rounding can move the means by an ulp past their exact ordering
  // min <= GM <= AM <= max; restore it.
  m.arithmetic_mean = std::clamp(m.arithmetic_mean, lo, hi);
  m.geometric_mean = std::min(std::clamp(m.geometric_mean, lo, hi), m.arithmetic_mean);

  if (lo == hi) {
    m.gini = 0.0;
  } else {
    // sum_ij |x_i - x_j| = 2 sum_i (2i - n - 1) x_(i) over the sorted values.
    std::vector<double> sorted(probs.begin(), probs.end());
    std::sort(sorted.begin(), sorted.end());
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += (2.0 * static_cast<double>(i + 1) - static_cast<double>(n) - 1.0) * sorted[i];
    }
    const double nn = static_cast<double>(n);
    m.gini = (2.0 * acc) / (2.0 * nn * nn * m.arithmetic_mean);
  }
  return m;
}

MetricVector metric_vector(const TokenProbSequence& seq) {
  if (seq.tokens.size() != seq.probs.size()) {
    throw LengthError("pair " + seq.pair_id + ": " + std::to_string(seq.tokens.size()) +
                      " tokens but " + std::to_string(seq.probs.size()) + " probabilities");
  }
  return metric_vector(std::span<const double>(seq.probs));
}

std::vector<MetricVector> metric_vectors(std::span<const TokenProbSequence> seqs) {
  std::vector<MetricVector> out(seqs.size());
  const auto n = static_cast<std::int64_t>(seqs.size());
  std::string first_error;
#pragma omp parallel for schedule(static) num_threads(jobs())
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      out[i] = metric_vector(seqs[i]);
    } catch (const Error& e) {
#pragma omp critical(xprobe_metrics_error)
      if (first_error.empty()) first_error = e.what();
    }
  }
  if (!first_error.empty()) throw DomainError(first_error);
  return out;
}

std::string_view preferred_name(Preferred p) {
  switch (p) {
    case Preferred::kFix: return "fix";
    case Preferred::kBug: return "bug";
    case Preferred::kTie: return "tie";
  }
  return "tie";
}

std::optional<Preferred> parse_preferred(std::string_view s) {
  if (s == "fix") return Preferred::kFix;
  if (s == "bug") return Preferred::kBug;
  if (s == "tie") return Preferred::kTie;
  return std::nullopt;
}

Preferred prefer(const MetricVector& bug, const MetricVector& fix, Metric metric) {
  const double b = bug.get(metric);
  const double f = fix.get(metric);
  if (b == f) return Preferred::kTie;
  const bool fix_larger = f > b;
  return fix_larger == higher_is_preferred(metric) ? Preferred::kFix : Preferred::kBug;
}

Preferred prefer(const MetricVector& bug, const MetricVector& fix, std::string_view name) {
  return prefer(bug, fix, parse_metric(name));
}

std::optional<double> PreferenceCell::fix_fraction() const {
  if (fix + bug == 0) return std::nullopt;
  return static_cast<double>(fix) / static_cast<double>(fix + bug);
}

std::optional<double> PreferenceCell::bug_fraction() const {
  if (fix + bug == 0) return std::nullopt;
  return static_cast<double>(bug) / static_cast<double>(fix + bug);
}

PreferenceCell preference_cell(std::span<const PreferenceVerdict> verdicts,
                               const std::map<std::string, ExposureCategory>& categories,
                               ExposureCategory condition, Metric metric,
                               const std::vector<std::string>* subset) {
  std::set<std::string_view> allowed;
  if (subset) allowed.insert(subset->begin(), subset->end());
  PreferenceCell cell;
  for (const auto& v : verdicts) {
    if (v.metric != metric) continue;
    const auto it = categories.find(v.pair_id);
    if (it == categories.end() || it->second != condition) continue;
    if (subset && !allowed.contains(v.pair_id)) continue;
    switch (v.preferred) {
      case Preferred::kFix: ++cell.fix; break;
      case Preferred::kBug: ++cell.bug; break;
      case Preferred::kTie: ++cell.ties; break;
    }
  }
  return cell;
}

std::map<Metric, PreferenceCell> preference_table(
    std::span<const PreferenceVerdict> verdicts,
    const std::map<std::string, ExposureCategory>& categories, ExposureCategory condition,
    const std::vector<std::string>* subset) {
  std::map<Metric, PreferenceCell> out;
  for (Metric m : kAllMetrics) out[m] = preference_cell(verdicts, categories, condition, m, subset);
  return out;
}

TokenProbSequence tokenprobs_from_json(const Json& rec, const TokenProbLoadOptions& opts,
                                       std::size_t* clamped) {
  TokenProbSequence s;
  try {
    s.pair_id = rec.at("pair_id").get<std::string>();
    const auto v = parse_variant(rec.at("variant").get<std::string>());
    if (!v) throw Error("variant must be \"bug\" or \"fix\"");
    s.variant = *v;
    s.tokens = rec.at("tokens").get<std::vector<std::string>>();
    const bool has_probs = rec.contains("probs");
    const bool has_logprobs = rec.contains("logprobs");
    if (has_probs == has_logprobs) throw Error("exactly one of \"probs\" and \"logprobs\" is required");
    const Json& values = has_probs ? rec.at("probs") : rec.at("logprobs");
    if (!values.is_array()) throw Error("probabilities must be an array");
    for (const Json& x : values) {
      double p = 0.0;
      if (x.is_null()) {
        p = 0.0;  // -inf log-probability
      } else {
        const double raw = x.get<double>();
        p = has_probs ? raw : std::exp(raw);
      }
      if (p == 0.0) {
        p = opts.zero_floor;
        if (clamped) ++*clamped;
      }
      s.probs.push_back(p);
    }
  } catch (const Json::exception& e) {
    throw Error(std::string("malformed token-probability record: ") + e.what());
  }
  if (s.tokens.size() != s.probs.size()) {
    throw LengthError(std::to_string(s.tokens.size()) + " tokens but " +
                      std::to_string(s.probs.size()) + " probabilities");
  }
  if (s.tokens.empty()) throw LengthError("empty token sequence");
  for (double p : s.probs) {
    if (!(p > 0.0 && p <= 1.0)) {
      throw DomainError("probability " + std::to_string(p) + " outside (0, 1]");
    }
  }
  return s;
}

Json tokenprobs_to_json(const TokenProbSequence& seq) {
  return {{"pair_id", seq.pair_id},
          {"variant", variant_name(seq.variant)},
          {"tokens", seq.tokens},
          {"probs", seq.probs}};
}

std::vector<TokenProbSequence> load_tokenprobs(const std::filesystem::path& path,
                                               const TokenProbLoadOptions& opts,
                                               std::size_t* clamped) {
  std::vector<TokenProbSequence> out;
  for_each_jsonl(
      path,
      [&](std::size_t line, const Json& rec) {
        try {
          out.push_back(tokenprobs_from_json(rec, opts, clamped));
        } catch (const Error& e) {
          throw SchemaError(line, e.what());
        }
      },
      [&](std::size_t line, const std::string& msg) { throw SchemaError(line, msg); });
  return out;
}

Json metric_vector_to_json(const std::string& pair_id, Variant v, const MetricVector& m) {
  return {{"pair_id", pair_id},
          {"variant", variant_name(v)},
          {"length", m.length},
          {"perplexity", m.perplexity},
          {"min_prob", m.min_prob},
          {"max_prob", m.max_prob},
          {"gini", m.gini},
          {"geometric_mean", m.geometric_mean},
          {"arithmetic_mean", m.arithmetic_mean}};
}

Json verdict_to_json(const PreferenceVerdict& v) {
  return {{"pair_id", v.pair_id},
          {"metric", metric_name(v.metric)},
          {"preferred", preferred_name(v.preferred)}};
}

std::vector<PreferenceVerdict> load_verdicts(const std::filesystem::path& path) {
  std::vector<PreferenceVerdict> out;
  for_each_jsonl(
      path,
      [&](std::size_t line, const Json& rec) {
        try {
          PreferenceVerdict v;
          v.pair_id = rec.at("pair_id").get<std::string>();
          v.metric = parse_metric(rec.at("metric").get<std::string>());
          const auto p = parse_preferred(rec.at("preferred").get<std::string>());
          if (!p) throw SchemaError(line, "preferred must be fix, bug or tie");
          v.preferred = *p;
          out.push_back(std::move(v));
        } catch (const Json::exception& e) {
          throw SchemaError(line, e.what());
        } catch (const DomainError& e) {
          throw SchemaError(line, e.what());
        }
      },
      [&](std::size_t line, const std::string& msg) { throw SchemaError(line, msg); });
  return out;
}

}  // namespace xprobe
