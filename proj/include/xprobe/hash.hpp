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
#include <string>
#include <string_view>

namespace xprobe {

struct Hash128 {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;

  friend bool operator==(const Hash128&, const Hash128&) = default;
  friend auto operator<=>(const Hash128&, const Hash128&) = default;
};

// MurmurHash3 x64_128 over `data`.  Output is identical on every platform
// (the block reads are explicitly little-endian).
Hash128 murmur3_128(std::string_view data, std::uint64_t seed);

// 64-bit finalizer used to derive independent substreams from a seed.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ULL;
  x ^= x >> 33;
  return x;
}

// 32 lowercase hex digits, hi word first.
std::string to_hex(const Hash128& h);

// Incremental content digest.  Feeding the same sequence of chunks always
// yields the same digest; chunk boundaries are part of the digest.
class Digest {
 public:
  explicit Digest(std::uint64_t seed = 0x6578706f73757265ULL) : state_{seed, ~seed} {}
  Digest& update(std::string_view chunk);
  Digest& update(std::uint64_t value);
  Hash128 value() const { return state_; }
  std::string hex() const { return to_hex(state_); }

 private:
  Hash128 state_;
};

}  // namespace xprobe
