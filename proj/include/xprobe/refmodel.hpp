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

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "xprobe/genmatch.hpp"
#include "xprobe/metrics.hpp"
#include "xprobe/portrait.hpp"

namespace xprobe {

// UTF-8 <-> code points.  Bytes that do not form valid UTF-8 decode to
// U+DC80..U+DCFF and encode back to the original byte.
std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);

// Character n-gram model with additive smoothing and back-off:
//   P(c | ctx) = (count(ctx, c) + alpha) / (count(ctx, .) + alpha |V|)
// where ctx is the longest suffix (at most `order` characters) of the
// running context that occurred in training.  The vocabulary is every
// training character plus one slot for unseen characters.
class NGramModel {
 public:
  struct Options {
    std::size_t order = 8;
    double alpha = 0.1;
    std::uint64_t seed = 0;
  };

  NGramModel() = default;

  // Deterministic and independent of document order.  Throws Error on an
  // empty corpus or a corpus without characters.
  static NGramModel train(std::span<const Document> documents, const Options& options);

  std::size_t order() const { return order_; }
  double alpha() const { return alpha_; }
  std::uint64_t seed() const { return seed_; }
  // |V|, including the unseen-character slot.
  std::size_t vocab_size() const { return vocab_.size() + 1; }
  const std::u32string& vocabulary() const { return vocab_; }

  // Raw training count of `next` after exactly `context` (no back-off).
  std::uint64_t count(std::u32string_view context, char32_t next) const;
  // Longest suffix of `context` (<= order) seen in training.
  std::u32string_view resolve_context(std::u32string_view context) const;

  // Distribution over the vocabulary (index vocab_size()-1 is the unseen slot).
  std::vector<double> distribution(std::u32string_view context) const;
  double probability(std::u32string_view context, char32_t next) const;

  // Per-character probabilities of `target` given `context` + the already
  // scored prefix.  Throws LengthError on an empty target.
  TokenProbSequence score_sequence(std::string_view context, std::string_view target) const;

  // `n_samples` completions of up to `max_chars` characters each; sample i
  // draws from a stream seeded by (seed, pair_id, i).  temperature == 0 is
  // greedy argmax.  Nucleus truncation keeps the most probable characters
  // (ties by code point) until their mass reaches top_p, boundary included.
  GenerationRecord sample_completions(std::string_view pair_id, std::string_view context,
                                      std::size_t n_samples, std::size_t max_chars,
                                      double temperature, double top_p,
                                      std::uint64_t seed) const;

  std::string identity() const;  // e.g. "refmodel-char8-a0.1"

  std::vector<std::uint8_t> serialize() const;
  static NGramModel deserialize(std::span<const std::uint8_t> bytes);

  bool operator==(const NGramModel& o) const {
    return order_ == o.order_ && alpha_ == o.alpha_ && seed_ == o.seed_ && vocab_ == o.vocab_ &&
           table_ == o.table_;
  }

 private:
  struct Counts {
    std::uint64_t total = 0;
    std::vector<std::pair<std::uint32_t, std::uint64_t>> next;  // (vocab index, count), sorted
    bool operator==(const Counts&) const = default;
  };

  std::uint32_t vocab_index(char32_t c) const;
  const Counts* lookup(std::u32string_view context) const;

  std::size_t order_ = 8;
  double alpha_ = 0.1;
  std::uint64_t seed_ = 0;
  std::u32string vocab_;  // sorted
  std::unordered_map<std::u32string, Counts> table_;
};

void save_model_file(const NGramModel& model, const std::filesystem::path& path);
NGramModel load_model_file(const std::filesystem::path& path);

struct ScoreRequest {
  std::string pair_id;
  Variant variant = Variant::kBug;
  std::string context;
  std::string target;
};

// OpenMP over requests.
std::vector<TokenProbSequence> score_batch(const NGramModel& model,
                                           std::span<const ScoreRequest> requests);

// Bug and fix requests for every pair, in pair order.
std::vector<ScoreRequest> score_requests(std::span<const BugFixPair> pairs);

struct GenerateOptions {
  std::size_t n_samples = kExpectedCompletions;
  std::size_t max_chars = 64;
  double temperature = 0.8;
  double top_p = 0.95;
  std::uint64_t seed = 0;
  std::size_t context_limit = 2048;  // characters of context kept (recorded only)
};

// OpenMP over pairs.
std::vector<GenerationRecord> generate_batch(const NGramModel& model,
                                             std::span<const BugFixPair> pairs,
                                             const GenerateOptions& options);

}  // namespace xprobe
