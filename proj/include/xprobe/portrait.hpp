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
#include <vector>

#include "xprobe/bloom.hpp"
#include "xprobe/canonical.hpp"
#include "xprobe/hash.hpp"

namespace xprobe {

// Build parameters of a strided Bloom-filter portrait.
struct PortraitParams {
  std::uint32_t width = 50;   // tokens per window (w)
  std::uint32_t stride = 50;  // tokens between stored window starts (s)
  double target_fpr = 0.001;
  std::uint64_t hash_seed = 0;
  // Sizing assumption n.  Zero means "count the windows in a first pass".
  std::uint64_t expected_elements = 0;
  // Filled by with_sizing(); zero until then.
  std::uint64_t bit_count = 0;
  std::uint32_t hash_count = 0;

  // Throws DomainError on w == 0, s == 0 or fpr outside (0, 1).
  void validate() const;

  // Copy with expected_elements = n and (m, k) set by optimal_sizing().
  PortraitParams with_sizing(std::uint64_t n) const;

  friend bool operator==(const PortraitParams&, const PortraitParams&) = default;
};

struct Window {
  std::string_view text;  // canonical UTF-8 bytes, exactly w tokens
  std::size_t start = 0;  // canonical token position
};

// Number of stored windows for a canonical length L: |{p : p % s == 0, p + w <= L}|.
std::size_t strided_window_count(std::size_t length, const PortraitParams& params);

// Windows at 0, s, 2s, ... each of exactly w tokens; a short tail is dropped.
// The views point into `stream`.
std::vector<Window> strided_windows(const CanonicalStream& stream, const PortraitParams& params);

struct Document {
  std::string id;
  std::string text;
};

// Immutable once built; safe for concurrent readers.
class Portrait {
 public:
  // Empty portrait with sized parameters (bit_count/hash_count must be set).
  explicit Portrait(const PortraitParams& params);

  const PortraitParams& params() const { return params_; }
  const BloomFilter& filter() const { return filter_; }
  std::uint64_t element_count() const { return element_count_; }
  const Hash128& corpus_digest() const { return corpus_digest_; }
  // Set when more than 2x the sizing assumption was inserted.
  bool degraded() const { return degraded_; }

  // Checked window API: `window` must contain exactly w tokens and no
  // space/newline characters, otherwise LengthError.
  void insert(std::string_view window);
  bool contains(std::string_view window) const;

  // Unchecked variants used by the build and query kernels.
  void insert_unchecked(std::string_view window) { filter_.insert(window); }
  bool contains_unchecked(std::string_view window) const { return filter_.contains(window); }

  friend bool operator==(const Portrait&, const Portrait&) = default;

 private:
  friend Portrait assemble_portrait(const PortraitParams&, BloomFilter, std::uint64_t,
                                    const Hash128&);
  friend Portrait load_portrait(std::span<const std::uint8_t> bytes);

  void check_window(std::string_view window) const;
  void refresh_degraded();

  PortraitParams params_;
  BloomFilter filter_;
  std::uint64_t element_count_ = 0;
  Hash128 corpus_digest_{};
  bool degraded_ = false;
};

// Order-independent digest of a document collection: per-document hashes of
// (id, text) are sorted before being folded.
Hash128 corpus_digest(std::span<const Document> documents);

// Exact number of windows the build would insert.
std::uint64_t count_windows(std::span<const Document> documents, const PortraitParams& params);

// Parallel build over documents.  Each worker fills a private bit array;
// the partial arrays are OR-ed together, so the result is bit-identical for
// any worker count and any document order.  When params.expected_elements
// is zero a counting pass supplies it.  Overflowing 2x the sizing
// assumption marks the portrait degraded and prints a warning.
Portrait build_portrait(std::span<const Document> documents, PortraitParams params);

// Internal: wraps a finished filter into a portrait.
Portrait assemble_portrait(const PortraitParams& params, BloomFilter filter,
                           std::uint64_t element_count, const Hash128& digest);

// "XPDP" container, format version 1:
//   magic[4] version:u16 width:u32 stride:u32 fpr:f64 seed:u64 expected:u64
//   bits:u64 k:u32 elements:u64 degraded:u8 digest[16] words:u64[...] crc32:u32
// All integers little-endian; crc32 covers every preceding byte.
inline constexpr std::uint16_t kPortraitFormatVersion = 1;
std::vector<std::uint8_t> serialize_portrait(const Portrait& portrait);
Portrait load_portrait(std::span<const std::uint8_t> bytes);

void save_portrait_file(const Portrait& portrait, const std::filesystem::path& path);
Portrait load_portrait_file(const std::filesystem::path& path);

// A directory is walked recursively (regular files, sorted by relative
// path, id = relative path); any other path is read as JSON lines with
// {"id": string, "content": string} records.
std::vector<Document> load_corpus(const std::filesystem::path& path);

}  // namespace xprobe
