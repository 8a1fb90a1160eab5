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

// Synthetic Java-like sources and single-statement bug/fix pairs for
// planted-corpus experiments, benchmarks and the bundled fixture.

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "xprobe/pair.hpp"
#include "xprobe/portrait.hpp"

namespace xprobe::synth {

// Portable RNG wrapper; avoids the implementation-defined std distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  std::uint64_t next() { return gen_(); }
  // Uniform in [0, n); n must be positive.
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(gen_() % n); }
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[below(v.size())];
  }

 private:
  std::mt19937_64 gen_;
};

// `n` tokens drawn from [A-Za-z0-9_(){};=+-*/<>.,], never spaces or newlines.
std::string random_tokens(Rng& rng, std::size_t n);

// A method-local identifier such as "buffer417".
std::string identifier(Rng& rng);

// `lines` lines of plausible Java statements with 8-space indentation.
std::string java_lines(Rng& rng, std::size_t lines);

// A whole class: header, `lines` body statements, closing braces.
std::string java_file(Rng& rng, std::size_t lines);

struct Mutation {
  std::string bug;
  std::string fix;
  std::string category;
};

// A bug/fix statement pair differing by one single-statement change.
Mutation statement_pair(Rng& rng);

// Pair with variant-matched source files: `before` context lines, the
// statement, then `after` lines.  context_before ends with the indentation
// that precedes the statement.
BugFixPair make_pair(Rng& rng, std::string pair_id, std::size_t before = 10,
                     std::size_t after = 8, std::uint64_t commits = 0);

// Wraps `text` in a document with `filler` random tokens before it (shifts
// the stride alignment) and a random Java tail after it.
Document embed(Rng& rng, std::string id, std::string_view text, std::size_t filler);

}  // namespace xprobe::synth
