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

#include "xprobe/bloom.hpp"

#include <bit>
#include <cmath>
#include <numeric>

#include "xprobe/error.hpp"

namespace xprobe {
namespace {

// h2 mod m, moved to the next value coprime with m so the k probes are
// distinct whenever k <= m.
std::uint64_t probe_step(std::uint64_t h2, std::uint64_t m) {
  if (m == 1) return 0;
  std::uint64_t step = h2 % m;
  while (step == 0 || std::gcd(step, m) != 1) step = step + 1 == m ? 1 : step + 1;
  return step;
}

}  // namespace

BloomSizing optimal_sizing(std::uint64_t expected_elements, double fpr) {
  if (!(fpr > 0.0 && fpr < 1.0)) throw DomainError("target false-positive rate must lie in (0, 1)");
  const double n = static_cast<double>(expected_elements == 0 ? 1 : expected_elements);
  const double ln2 = std::log(2.0);
  const double m = std::ceil(-n * std::log(fpr) / (ln2 * ln2));
  const double k = std::ceil((m / n) * ln2);
  BloomSizing s;
  s.bit_count = static_cast<std::uint64_t>(m < 1.0 ? 1.0 : m);
  s.hash_count = static_cast<std::uint32_t>(k < 1.0 ? 1.0 : k);
  return s;
}

BloomFilter::BloomFilter(std::uint64_t bit_count, std::uint32_t hash_count, std::uint64_t seed)
    : bit_count_(bit_count), hash_count_(hash_count), seed_(seed), words_((bit_count + 63) / 64, 0) {
  if (bit_count == 0 || hash_count == 0) throw DomainError("bloom filter needs m >= 1 and k >= 1");
}

void BloomFilter::insert_hash(const Hash128& h) {
  std::uint64_t idx = h.lo % bit_count_;
  const std::uint64_t step = probe_step(h.hi, bit_count_);
  for (std::uint32_t i = 0; i < hash_count_; ++i) {
    words_[idx >> 6] |= std::uint64_t{1} << (idx & 63);
    idx += step;
    if (idx >= bit_count_) idx -= bit_count_;
  }
}

bool BloomFilter::contains_hash(const Hash128& h) const {
  std::uint64_t idx = h.lo % bit_count_;
  const std::uint64_t step = probe_step(h.hi, bit_count_);
  for (std::uint32_t i = 0; i < hash_count_; ++i) {
    if ((words_[idx >> 6] & (std::uint64_t{1} << (idx & 63))) == 0) return false;
    idx += step;
    if (idx >= bit_count_) idx -= bit_count_;
  }
  return true;
}

void BloomFilter::merge(const BloomFilter& other) {
  if (other.bit_count_ != bit_count_ || other.hash_count_ != hash_count_ || other.seed_ != seed_) {
    throw DomainError("cannot merge bloom filters with different geometry");
  }
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
}

std::uint64_t BloomFilter::popcount() const {
  std::uint64_t n = 0;
  for (auto w : words_) n += static_cast<std::uint64_t>(std::popcount(w));
  return n;
}

}  // namespace xprobe
