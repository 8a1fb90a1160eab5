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

#include "xprobe/canonical.hpp"

namespace xprobe {
namespace {

// Length of the UTF-8 sequence starting at `p`, or 1 for a stray byte.
std::size_t utf8_length(std::string_view text, std::size_t p) {
  const auto lead = static_cast<unsigned char>(text[p]);
  std::size_t n = 1;
  if (lead >= 0xf0 && lead < 0xf8) {
    n = 4;
  } else if (lead >= 0xe0) {
    n = lead < 0xf0 ? 3 : 1;
  } else if (lead >= 0xc0) {
    n = 2;
  }
  if (p + n > text.size()) return 1;
  for (std::size_t i = 1; i < n; ++i) {
    if ((static_cast<unsigned char>(text[p + i]) & 0xc0) != 0x80) return 1;
  }
  return n;
}

}  // namespace

std::string_view CanonicalStream::slice(std::size_t pos, std::size_t count) const {
  const std::size_t b = byte_at(pos);
  const std::size_t e = byte_at(pos + count);
  return std::string_view(bytes_).substr(b, e - b);
}

CanonicalStream canonicalize(std::string_view text) {
  CanonicalStream out;
  out.bytes_.reserve(text.size());
  out.offset_map_.reserve(text.size());
  out.token_start_.reserve(text.size());
  std::size_t p = 0;
  while (p < text.size()) {
    if (is_dropped_char(text[p])) {
      ++p;
      continue;
    }
    const std::size_t n = utf8_length(text, p);
    out.token_start_.push_back(out.bytes_.size());
    out.offset_map_.push_back(p);
    out.bytes_.append(text.substr(p, n));
    p += n;
  }
  return out;
}

std::size_t canonical_length(std::string_view text) {
  std::size_t count = 0;
  std::size_t p = 0;
  while (p < text.size()) {
    if (is_dropped_char(text[p])) {
      ++p;
      continue;
    }
    p += utf8_length(text, p);
    ++count;
  }
  return count;
}

}  // namespace xprobe
