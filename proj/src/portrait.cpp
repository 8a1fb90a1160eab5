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

#include "xprobe/portrait.hpp"

#include <algorithm>
#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "xprobe/error.hpp"
#include "xprobe/io.hpp"
#include "xprobe/parallel.hpp"

namespace xprobe {

namespace fs = std::filesystem;

void PortraitParams::validate() const {
  if (width == 0) throw DomainError("window width must be >= 1");
  if (stride == 0) throw DomainError("stride must be >= 1");
  if (!(target_fpr > 0.0 && target_fpr < 1.0)) {
    throw DomainError("target false-positive rate must lie in (0, 1)");
  }
}

PortraitParams PortraitParams::with_sizing(std::uint64_t n) const {
  validate();
  PortraitParams p = *this;
  p.expected_elements = n;
  const BloomSizing s = optimal_sizing(n, target_fpr);
  p.bit_count = s.bit_count;
  p.hash_count = s.hash_count;
  return p;
}

std::size_t strided_window_count(std::size_t length, const PortraitParams& params) {
  if (length < params.width) return 0;
  return (length - params.width) / params.stride + 1;
}

std::vector<Window> strided_windows(const CanonicalStream& stream, const PortraitParams& params) {
  std::vector<Window> out;
  out.reserve(strided_window_count(stream.size(), params));
  for (std::size_t p = 0; p + params.width <= stream.size(); p += params.stride) {
    out.push_back({stream.slice(p, params.width), p});
  }
  return out;
}

Portrait::Portrait(const PortraitParams& params) : params_(params) {
  params_.validate();
  if (params_.bit_count == 0 || params_.hash_count == 0) {
    params_ = params_.with_sizing(params_.expected_elements);
  }
  filter_ = BloomFilter(params_.bit_count, params_.hash_count, params_.hash_seed);
}

void Portrait::check_window(std::string_view window) const {
  const CanonicalStream c = canonicalize(window);
  if (c.bytes().size() != window.size()) {
    throw LengthError("window contains space or newline characters");
  }
  if (c.size() != params_.width) {
    throw LengthError("window has " + std::to_string(c.size()) + " tokens, expected " +
                      std::to_string(params_.width));
  }
}

void Portrait::refresh_degraded() {
  const std::uint64_t n = std::max<std::uint64_t>(params_.expected_elements, 1);
  degraded_ = element_count_ > 2 * n;
}

void Portrait::insert(std::string_view window) {
  check_window(window);
  filter_.insert(window);
  ++element_count_;
  refresh_degraded();
}

bool Portrait::contains(std::string_view window) const {
  check_window(window);
  return filter_.contains(window);
}

Hash128 corpus_digest(std::span<const Document> documents) {
  std::vector<Hash128> per_doc;
  per_doc.reserve(documents.size());
  for (const auto& d : documents) {
    per_doc.push_back(Digest().update(d.id).update(d.text).value());
  }
  std::sort(per_doc.begin(), per_doc.end());
  Digest all;
  all.update(static_cast<std::uint64_t>(per_doc.size()));
  for (const auto& h : per_doc) all.update(h.lo).update(h.hi);
  return all.value();
}

std::uint64_t count_windows(std::span<const Document> documents, const PortraitParams& params) {
  std::uint64_t total = 0;
  const auto n = static_cast<std::int64_t>(documents.size());
#pragma omp parallel for reduction(+ : total) schedule(dynamic, 16) num_threads(jobs())
  for (std::int64_t i = 0; i < n; ++i) {
    total += strided_window_count(canonical_length(documents[i].text), params);
  }
  return total;
}

Portrait assemble_portrait(const PortraitParams& params, BloomFilter filter,
                           std::uint64_t element_count, const Hash128& digest) {
  Portrait p(params);
  p.filter_ = std::move(filter);
  p.element_count_ = element_count;
  p.corpus_digest_ = digest;
  p.refresh_degraded();
  return p;
}

Portrait build_portrait(std::span<const Document> documents, PortraitParams params) {
  params.validate();
  if (params.expected_elements == 0) params.expected_elements = count_windows(documents, params);
  params = params.with_sizing(params.expected_elements);

  BloomFilter merged(params.bit_count, params.hash_count, params.hash_seed);
  std::uint64_t inserted = 0;
  const auto n = static_cast<std::int64_t>(documents.size());

#pragma omp parallel num_threads(jobs()) reduction(+ : inserted)
  {
    BloomFilter local(params.bit_count, params.hash_count, params.hash_seed);
#pragma omp for schedule(dynamic, 16) nowait
    for (std::int64_t i = 0; i < n; ++i) {
      const CanonicalStream stream = canonicalize(documents[i].text);
      for (const Window& win : strided_windows(stream, params)) {
        local.insert(win.text);
        ++inserted;
      }
    }
#pragma omp critical(xprobe_portrait_merge)
    merged.merge(local);
  }

  Portrait portrait = assemble_portrait(params, std::move(merged), inserted, corpus_digest(documents));
  if (portrait.degraded()) {
    std::cerr << "warning: portrait holds " << inserted << " windows, more than twice the sizing "
              << "assumption of " << params.expected_elements
              << "; the false-positive target no longer holds\n";
  }
  return portrait;
}

namespace {
constexpr std::string_view kMagic = "XPDP";
}

std::vector<std::uint8_t> serialize_portrait(const Portrait& portrait) {
  const PortraitParams& p = portrait.params();
  ByteWriter w;
  w.put_bytes(kMagic);
  w.put_u16(kPortraitFormatVersion);
  w.put_u32(p.width);
  w.put_u32(p.stride);
  w.put_f64(p.target_fpr);
  w.put_u64(p.hash_seed);
  w.put_u64(p.expected_elements);
  w.put_u64(p.bit_count);
  w.put_u32(p.hash_count);
  w.put_u64(portrait.element_count());
  w.put_u8(portrait.degraded() ? 1 : 0);
  w.put_u64(portrait.corpus_digest().lo);
  w.put_u64(portrait.corpus_digest().hi);
  const auto words = portrait.filter().words();
  w.put_u64(words.size());
  for (auto word : words) w.put_u64(word);
  w.put_u32(crc32_of(w.buffer()));
  return std::move(w.buffer());
}

Portrait load_portrait(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kMagic.size() + 2 ||
      std::string_view(reinterpret_cast<const char*>(bytes.data()), kMagic.size()) != kMagic) {
    throw FormatError("not a portrait file (bad magic)");
  }
  ByteReader header(bytes.subspan(kMagic.size(), 2));
  const std::uint16_t version = header.get_u16();
  if (version != kPortraitFormatVersion) {
    throw FormatError("unsupported portrait format version " + std::to_string(version));
  }
  if (bytes.size() < 4) throw ChecksumError("portrait checksum mismatch");
  const auto payload = bytes.first(bytes.size() - 4);
  ByteReader trailer(bytes.last(4));
  if (trailer.get_u32() != crc32_of(payload)) throw ChecksumError("portrait checksum mismatch");

  ByteReader r(payload);
  r.get_bytes(kMagic.size());
  r.get_u16();
  PortraitParams p;
  p.width = r.get_u32();
  p.stride = r.get_u32();
  p.target_fpr = r.get_f64();
  p.hash_seed = r.get_u64();
  p.expected_elements = r.get_u64();
  p.bit_count = r.get_u64();
  p.hash_count = r.get_u32();
  const std::uint64_t elements = r.get_u64();
  const bool degraded = r.get_u8() != 0;
  Hash128 digest;
  digest.lo = r.get_u64();
  digest.hi = r.get_u64();
  const std::uint64_t nwords = r.get_u64();
  if (nwords != (p.bit_count + 63) / 64 || r.remaining() != nwords * 8) {
    throw FormatError("portrait bit array has inconsistent length");
  }
  BloomFilter filter(p.bit_count, p.hash_count, p.hash_seed);
  auto words = filter.mutable_words();
  for (std::uint64_t i = 0; i < nwords; ++i) words[i] = r.get_u64();

  Portrait out = assemble_portrait(p, std::move(filter), elements, digest);
  out.degraded_ = degraded;
  return out;
}

void save_portrait_file(const Portrait& portrait, const fs::path& path) {
  write_binary_file(path, serialize_portrait(portrait));
}

Portrait load_portrait_file(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("portrait file not found: " + path.string());
  return load_portrait(read_binary_file(path));
}

std::vector<Document> load_corpus(const fs::path& path) {
  std::vector<Document> docs;
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(path)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      docs.push_back({fs::relative(f, path).generic_string(), read_file(f)});
    }
    return docs;
  }
  if (!fs::exists(path)) throw IoError("corpus not found: " + path.string());
  std::size_t bad_line = 0;
  std::string bad_msg;
  auto reject = [&](std::size_t line, std::string msg) {
    if (bad_line == 0) {
      bad_line = line;
      bad_msg = std::move(msg);
    }
  };
  for_each_jsonl(
      path,
      [&](std::size_t line, const Json& rec) {
        const auto id = rec.find("id");
        const auto content = rec.find("content");
        if (id == rec.end() || !id->is_string()) return reject(line, "missing string field \"id\"");
        if (content == rec.end() || !content->is_string()) {
          return reject(line, "missing string field \"content\"");
        }
        docs.push_back({id->get<std::string>(), content->get<std::string>()});
      },
      reject);
  if (bad_line != 0) throw SchemaError(bad_line, path.string() + ": " + bad_msg);
  return docs;
}

}  // namespace xprobe
