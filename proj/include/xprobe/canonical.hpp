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
#include <string>
#include <string_view>
#include <vector>

namespace xprobe {

// Text with spaces (U+0020), line feeds and carriage returns removed.
// Every remaining code point is one token.  The kept code points are stored
// as UTF-8; `offset_map()[i]` is the byte offset of token i in the original.
class CanonicalStream {
 public:
  CanonicalStream() = default;

  // Number of tokens (code points, or stray bytes of invalid UTF-8).
  std::size_t size() const { return offset_map_.size(); }
  bool empty() const { return offset_map_.empty(); }

  // UTF-8 bytes of the whole stream.
  const std::string& bytes() const { return bytes_; }
  const std::vector<std::size_t>& offset_map() const { return offset_map_; }

  // UTF-8 bytes of tokens [pos, pos + count).
  std::string_view slice(std::size_t pos, std::size_t count) const;

  // Byte index in bytes() where token `pos` begins; pos == size() is allowed.
  std::size_t byte_at(std::size_t pos) const {
    return pos == token_start_.size() ? bytes_.size() : token_start_[pos];
  }

  friend bool operator==(const CanonicalStream&, const CanonicalStream&) = default;

 private:
  friend CanonicalStream canonicalize(std::string_view text);

  std::string bytes_;
  std::vector<std::size_t> token_start_;
  std::vector<std::size_t> offset_map_;
};

// True for the three characters that are not tokens.
constexpr bool is_dropped_char(char c) { return c == ' ' || c == '\n' || c == '\r'; }

CanonicalStream canonicalize(std::string_view text);

// Number of tokens in `text` after canonicalization.
std::size_t canonical_length(std::string_view text);

}  // namespace xprobe
