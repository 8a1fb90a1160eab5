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

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "xprobe/canonical.hpp"
#include "xprobe/pair.hpp"
#include "xprobe/portrait.hpp"

namespace xprobe {

inline constexpr double kDefaultSeenThreshold = 0.9;

// Half-open range [begin, end) of canonical token positions.
struct TokenSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
  friend bool operator==(const TokenSpan&, const TokenSpan&) = default;
};

struct PaddedQuery {
  TokenSpan snippet;
  TokenSpan padded;
  std::size_t sample_len = 0;
  std::string query_text;  // canonical bytes of `padded`
  // Padding could not reach min_sound_length(), or no real context existed.
  bool unsound = false;
};

struct ExposureReport {
  std::size_t hit_window_count = 0;
  std::size_t expected_aligned_count = 1;
  double exposure_score = 0.0;
  double coverage_fraction = 0.0;
  bool seen = false;
  bool unsound = false;

  friend bool operator==(const ExposureReport&, const ExposureReport&) = default;
};

// Shortest query guaranteed to contain a whole stored window: s + w - 1.
std::size_t min_sound_length(const PortraitParams& params);

// Pads `snippet` to min_sound_length() tokens, taking one token from the
// left, then one from the right, and so on; an exhausted side hands over to
// the other.  Throws SpanError when `snippet` is not inside `document`.
PaddedQuery pad_query(const CanonicalStream& document, TokenSpan snippet,
                      const PortraitParams& params);

// Query start positions p (0-based, w-token windows slid one token at a
// time) whose window is in the portrait.
std::vector<std::size_t> hit_positions(const Portrait& portrait, const CanonicalStream& query);

// Slides a w-token window over the query; the score is the number of hit
// windows over floor((L - w) / s) + 1.  Queries shorter than w produce an
// unsound report with score 0.
ExposureReport query_exposure(const Portrait& portrait, const PaddedQuery& query,
                              double threshold = kDefaultSeenThreshold);

// OpenMP over queries.  Result i corresponds to queries[i].
std::vector<ExposureReport> query_exposure_batch(const Portrait& portrait,
                                                 std::span<const PaddedQuery> queries,
                                                 double threshold = kDefaultSeenThreshold);

// Locates one variant of `pair` inside its source file and pads it there.
// Without a source file the variant text is queried alone if it is already
// long enough, otherwise the query is marked unsound (exposure unavailable).
// Throws SpanError when the variant is not found in its source file.
PaddedQuery variant_query(const BugFixPair& pair, Variant variant, const PortraitParams& params);

struct PairClassification {
  ExposureReport bug;
  ExposureReport fix;
  ExposureCategory category = ExposureCategory::kNeither;
};

PairClassification classify_pair(const Portrait& portrait, const BugFixPair& pair,
                                 double threshold = kDefaultSeenThreshold);

}  // namespace xprobe
