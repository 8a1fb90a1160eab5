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

#include "xprobe/membership.hpp"

#include <algorithm>

#include "xprobe/error.hpp"
#include "xprobe/parallel.hpp"

namespace xprobe {

std::size_t min_sound_length(const PortraitParams& params) {
  params.validate();
  return static_cast<std::size_t>(params.stride) + params.width - 1;
}

PaddedQuery pad_query(const CanonicalStream& document, TokenSpan snippet,
                      const PortraitParams& params) {
  if (snippet.begin > snippet.end || snippet.end > document.size()) {
    throw SpanError("snippet span [" + std::to_string(snippet.begin) + ", " +
                    std::to_string(snippet.end) + ") outside document of " +
                    std::to_string(document.size()) + " tokens");
  }
  const std::size_t target = min_sound_length(params);
  PaddedQuery q;
  q.snippet = snippet;
  q.sample_len = snippet.size();
  q.padded = snippet;
  bool take_left = true;
  while (q.padded.size() < target) {
    const bool left_room = q.padded.begin > 0;
    const bool right_room = q.padded.end < document.size();
    if (!left_room && !right_room) break;
    if ((take_left && left_room) || !right_room) {
      --q.padded.begin;
    } else {
      ++q.padded.end;
    }
    take_left = !take_left;
  }
  q.unsound = q.padded.size() < target;
  q.query_text = std::string(document.slice(q.padded.begin, q.padded.size()));
  return q;
}

std::vector<std::size_t> hit_positions(const Portrait& portrait, const CanonicalStream& query) {
  const std::size_t w = portrait.params().width;
  std::vector<std::size_t> hits;
  for (std::size_t p = 0; p + w <= query.size(); ++p) {
    if (portrait.contains_unchecked(query.slice(p, w))) hits.push_back(p);
  }
  return hits;
}

ExposureReport query_exposure(const Portrait& portrait, const PaddedQuery& query,
                              double threshold) {
  const PortraitParams& params = portrait.params();
  const CanonicalStream stream = canonicalize(query.query_text);
  const std::size_t length = stream.size();
  ExposureReport r;
  r.unsound = query.unsound;
  if (length < params.width) {
    r.unsound = true;
    return r;
  }
  const std::vector<std::size_t> hits = hit_positions(portrait, stream);
  r.hit_window_count = hits.size();
  r.expected_aligned_count = strided_window_count(length, params);
  r.exposure_score =
      static_cast<double>(r.hit_window_count) / static_cast<double>(r.expected_aligned_count);

  // Union of hit windows; hits are sorted, so one sweep merges the chains.
  std::size_t covered = 0;
  std::size_t chain_end = 0;
  for (std::size_t p : hits) {
    const std::size_t end = p + params.width;
    covered += end - std::max(p, chain_end);
    chain_end = end;
  }
  r.coverage_fraction = static_cast<double>(covered) / static_cast<double>(length);
  r.seen = !r.unsound && r.exposure_score >= threshold;
  return r;
}

std::vector<ExposureReport> query_exposure_batch(const Portrait& portrait,
                                                 std::span<const PaddedQuery> queries,
                                                 double threshold) {
  std::vector<ExposureReport> out(queries.size());
  const auto n = static_cast<std::int64_t>(queries.size());
#pragma omp parallel for schedule(dynamic, 8) num_threads(jobs())
  for (std::int64_t i = 0; i < n; ++i) {
    out[i] = query_exposure(portrait, queries[i], threshold);
  }
  return out;
}

namespace {

// Longest context tail used to disambiguate where the variant sits.
constexpr std::size_t kAnchorTokens = 256;

std::size_t token_index_of_byte(const CanonicalStream& s, std::size_t byte) {
  std::size_t lo = 0;
  std::size_t hi = s.size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (s.byte_at(mid) < byte) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return lo;
}

// First token-aligned occurrence of `needle` in `hay`, as a token index.
std::optional<std::size_t> find_tokens(const CanonicalStream& hay, std::string_view needle) {
  std::size_t from = 0;
  const std::string& bytes = hay.bytes();
  while (true) {
    const std::size_t at = bytes.find(needle, from);
    if (at == std::string::npos) return std::nullopt;
    const std::size_t tok = token_index_of_byte(hay, at);
    if (tok < hay.size() && hay.byte_at(tok) == at) return tok;
    from = at + 1;
  }
}

}  // namespace

PaddedQuery variant_query(const BugFixPair& pair, Variant variant, const PortraitParams& params) {
  const std::string& text = pair.text(variant);
  const CanonicalStream snippet = canonicalize(text);
  const auto& file = pair.source_file(variant);
  if (!file) {
    PaddedQuery q;
    q.sample_len = snippet.size();
    q.snippet = {0, snippet.size()};
    q.padded = q.snippet;
    q.query_text = snippet.bytes();
    q.unsound = snippet.size() < min_sound_length(params);
    return q;
  }

  const CanonicalStream doc = canonicalize(*file);
  const CanonicalStream ctx = canonicalize(pair.context_before);
  std::optional<std::size_t> start;
  if (!ctx.empty()) {
    const std::size_t tail = std::min(ctx.size(), kAnchorTokens);
    std::string anchored(ctx.slice(ctx.size() - tail, tail));
    anchored += snippet.bytes();
    if (auto at = find_tokens(doc, anchored)) start = *at + tail;
  }
  if (!start) start = find_tokens(doc, snippet.bytes());
  if (!start) {
    throw SpanError("pair " + pair.pair_id + ": " + std::string(variant_name(variant)) +
                    " text not found in its source file");
  }
  return pad_query(doc, {*start, *start + snippet.size()}, params);
}

PairClassification classify_pair(const Portrait& portrait, const BugFixPair& pair,
                                 double threshold) {
  PairClassification c;
  c.bug = query_exposure(portrait, variant_query(pair, Variant::kBug, portrait.params()), threshold);
  c.fix = query_exposure(portrait, variant_query(pair, Variant::kFix, portrait.params()), threshold);
  c.category = category_from_seen(c.bug.seen, c.fix.seen);
  return c;
}

}  // namespace xprobe
