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
#include <span>
#include <string_view>
#include <vector>

#include "xprobe/hash.hpp"

namespace xprobe {

struct BloomSizing {
  std::uint64_t bit_count = 0;
  std::uint32_t hash_count = 0;
};

// Optimal sizing for `expected_elements` at false-positive rate `fpr`:
//   m = ceil(-n ln p / (ln 2)^2),  k = ceil((m / n) ln 2).
// n is taken as at least 1.
BloomSizing optimal_sizing(std::uint64_t expected_elements, double fpr);

// Plain bit array with k indices derived by double hashing:
//   index_i = (h1 + i * h2) mod m, where h2 mod m is advanced to the next
// value coprime with m.
class BloomFilter {
 public:
  BloomFilter() = default;
  BloomFilter(std::uint64_t bit_count, std::uint32_t hash_count, std::uint64_t seed);

  void insert(std::string_view key) { insert_hash(murmur3_128(key, seed_)); }
  bool contains(std::string_view key) const { return contains_hash(murmur3_128(key, seed_)); }

  void insert_hash(const Hash128& h);
  bool contains_hash(const Hash128& h) const;

  // Bitwise OR of a filter with identical geometry and seed.
  void merge(const BloomFilter& other);

  std::uint64_t bit_count() const { return bit_count_; }
  std::uint32_t hash_count() const { return hash_count_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t popcount() const;

  std::span<const std::uint64_t> words() const { return words_; }
  std::span<std::uint64_t> mutable_words() { return words_; }

  friend bool operator==(const BloomFilter&, const BloomFilter&) = default;

 private:
  std::uint64_t bit_count_ = 0;
  std::uint32_t hash_count_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace xprobe
