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

#include "xprobe/reference.hpp"

#include <cmath>

#include "xprobe/error.hpp"

namespace xprobe::ref {

Portrait build_portrait(std::span<const Document> documents, PortraitParams params) {
  params.validate();
  if (params.expected_elements == 0) params.expected_elements = count_windows(documents, params);
  params = params.with_sizing(params.expected_elements);
  BloomFilter filter(params.bit_count, params.hash_count, params.hash_seed);
  std::uint64_t inserted = 0;
  for (const auto& doc : documents) {
    const CanonicalStream stream = canonicalize(doc.text);
    for (std::size_t p = 0; p + params.width <= stream.size(); p += params.stride) {
      filter.insert(stream.slice(p, params.width));
      ++inserted;
    }
  }
  return assemble_portrait(params, std::move(filter), inserted, corpus_digest(documents));
}

ExposureReport query_exposure(const Portrait& portrait, const PaddedQuery& query,
                              double threshold) {
  const std::size_t w = portrait.params().width;
  const std::size_t s = portrait.params().stride;
  const CanonicalStream stream = canonicalize(query.query_text);
  const std::size_t length = stream.size();
  ExposureReport r;
  r.unsound = query.unsound || length < w;
  if (length < w) return r;
  std::vector<bool> covered(length, false);
  for (std::size_t p = 0; p + w <= length; ++p) {
    if (!portrait.filter().contains(stream.slice(p, w))) continue;
    ++r.hit_window_count;
    for (std::size_t t = p; t < p + w; ++t) covered[t] = true;
  }
  r.expected_aligned_count = 0;
  for (std::size_t p = 0; p + w <= length; p += s) ++r.expected_aligned_count;
  r.exposure_score =
      static_cast<double>(r.hit_window_count) / static_cast<double>(r.expected_aligned_count);
  std::size_t n_covered = 0;
  for (bool c : covered) n_covered += c ? 1 : 0;
  r.coverage_fraction = static_cast<double>(n_covered) / static_cast<double>(length);
  r.seen = !r.unsound && r.exposure_score >= threshold;
  return r;
}

std::vector<ExposureReport> query_exposure_batch(const Portrait& portrait,
                                                 std::span<const PaddedQuery> queries,
                                                 double threshold) {
  std::vector<ExposureReport> out;
  out.reserve(queries.size());
  for (const auto& q : queries) out.push_back(ref::query_exposure(portrait, q, threshold));
  return out;
}

MetricVector metric_vector(std::span<const double> probs) {
  if (probs.empty()) throw LengthError("token probability sequence is empty");
  const std::size_t n = probs.size();
  MetricVector m;
  m.length = n;
  m.min_prob = probs[0];
  m.max_prob = probs[0];
  double sum = 0.0;
  double log_sum = 0.0;
  for (double p : probs) {
    if (!(p > 0.0 && p <= 1.0)) throw DomainError("token probability outside (0, 1]");
    sum += p;
    log_sum += std::log(p);
    if (p < m.min_prob) m.min_prob = p;
    if (p > m.max_prob) m.max_prob = p;
  }
  const double dn = static_cast<double>(n);
  m.arithmetic_mean = sum / dn;
  m.geometric_mean = std::exp(log_sum / dn);
  m.perplexity = std::exp(-log_sum / dn);
  double abs_diff = 0.0;
  for (double a : probs) {
    for (double b : probs) abs_diff += std::fabs(a - b);
  }
  m.gini = n == 1 ? 0.0 : abs_diff / (2.0 * dn * dn * m.arithmetic_mean);
  return m;
}

std::vector<MetricVector> metric_vectors(std::span<const TokenProbSequence> seqs) {
  std::vector<MetricVector> out;
  out.reserve(seqs.size());
  for (const auto& s : seqs) {
    if (s.tokens.size() != s.probs.size()) throw LengthError("token/probability length mismatch");
    out.push_back(ref::metric_vector(s.probs));
  }
  return out;
}

std::vector<TokenProbSequence> score_batch(const NGramModel& model,
                                           std::span<const ScoreRequest> requests) {
  std::vector<TokenProbSequence> out;
  out.reserve(requests.size());
  for (const auto& r : requests) {
    TokenProbSequence s = model.score_sequence(r.context, r.target);
    s.pair_id = r.pair_id;
    s.variant = r.variant;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace xprobe::ref
