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

#include "xprobe/refmodel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "xprobe/error.hpp"
#include "xprobe/hash.hpp"
#include "xprobe/io.hpp"
#include "xprobe/parallel.hpp"

namespace xprobe {

std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    std::size_t n = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
      n = 1;
      cp = b0;
    } else if (b0 >= 0xc2 && b0 < 0xe0) {
      n = 2;
      cp = b0 & 0x1f;
    } else if (b0 >= 0xe0 && b0 < 0xf0) {
      n = 3;
      cp = b0 & 0x0f;
    } else if (b0 >= 0xf0 && b0 < 0xf5) {
      n = 4;
      cp = b0 & 0x07;
    }
    bool ok = n > 0 && i + n <= s.size();
    for (std::size_t k = 1; ok && k < n; ++k) {
      const auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xc0) != 0x80) {
        ok = false;
      } else {
        cp = (cp << 6) | (b & 0x3f);
      }
    }
    // Reject overlong forms, surrogates and out-of-range values.
    if (ok && ((n == 3 && cp < 0x800) || (n == 4 && (cp < 0x10000 || cp > 0x10ffff)) ||
               (cp >= 0xd800 && cp <= 0xdfff))) {
      ok = false;
    }
    if (!ok) {
      out.push_back(0xdc00 + b0);
      ++i;
    } else {
      out.push_back(cp);
      i += n;
    }
  }
  return out;
}

std::string encode_utf8(std::u32string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t c : s) {
    if (c >= 0xdc80 && c <= 0xdcff) {
      out.push_back(static_cast<char>(c - 0xdc00));
    } else if (c < 0x80) {
      out.push_back(static_cast<char>(c));
    } else if (c < 0x800) {
      out.push_back(static_cast<char>(0xc0 | (c >> 6)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3f)));
    } else if (c < 0x10000) {
      out.push_back(static_cast<char>(0xe0 | (c >> 12)));
      out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3f)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3f)));
    } else {
      out.push_back(static_cast<char>(0xf0 | (c >> 18)));
      out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3f)));
      out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3f)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3f)));
    }
  }
  return out;
}

NGramModel NGramModel::train(std::span<const Document> documents, const Options& options) {
  if (documents.empty()) throw Error("cannot train on an empty corpus");
  if (!(options.alpha > 0.0)) throw DomainError("smoothing alpha must be positive");

  std::vector<std::u32string> decoded;
  decoded.reserve(documents.size());
  std::u32string vocab;
  for (const auto& d : documents) {
    decoded.push_back(decode_utf8(d.text));
    vocab += decoded.back();
    std::sort(vocab.begin(), vocab.end());
    vocab.erase(std::unique(vocab.begin(), vocab.end()), vocab.end());
  }
  if (vocab.empty()) throw Error("training corpus contains no characters");

  NGramModel m;
  m.order_ = options.order;
  m.alpha_ = options.alpha;
  m.seed_ = options.seed;
  m.vocab_ = std::move(vocab);

  std::unordered_map<std::u32string, std::map<std::uint32_t, std::uint64_t>> raw;
  for (const auto& text : decoded) {
    for (std::size_t i = 0; i < text.size(); ++i) {
      const std::uint32_t next = m.vocab_index(text[i]);
      const std::size_t max_len = std::min(i, m.order_);
      for (std::size_t len = 0; len <= max_len; ++len) {
        ++raw[text.substr(i - len, len)][next];
      }
    }
  }
  m.table_.reserve(raw.size());
  for (auto& [ctx, nexts] : raw) {
    Counts c;
    c.next.assign(nexts.begin(), nexts.end());
    for (const auto& [idx, n] : c.next) c.total += n;
    m.table_.emplace(ctx, std::move(c));
  }
  return m;
}

std::uint32_t NGramModel::vocab_index(char32_t c) const {
  const auto it = std::lower_bound(vocab_.begin(), vocab_.end(), c);
  if (it == vocab_.end() || *it != c) return static_cast<std::uint32_t>(vocab_.size());
  return static_cast<std::uint32_t>(it - vocab_.begin());
}

const NGramModel::Counts* NGramModel::lookup(std::u32string_view context) const {
  const auto it = table_.find(std::u32string(context));
  return it == table_.end() ? nullptr : &it->second;
}

std::uint64_t NGramModel::count(std::u32string_view context, char32_t next) const {
  const Counts* c = lookup(context);
  if (!c) return 0;
  const std::uint32_t idx = vocab_index(next);
  const auto it = std::lower_bound(c->next.begin(), c->next.end(), std::make_pair(idx, std::uint64_t{0}));
  return (it != c->next.end() && it->first == idx) ? it->second : 0;
}

std::u32string_view NGramModel::resolve_context(std::u32string_view context) const {
  std::size_t len = std::min(context.size(), order_);
  while (true) {
    const std::u32string_view suffix = context.substr(context.size() - len);
    if (len == 0 || lookup(suffix) != nullptr) return suffix;
    --len;
  }
}

std::vector<double> NGramModel::distribution(std::u32string_view context) const {
  const Counts* c = lookup(resolve_context(context));
  const double v = static_cast<double>(vocab_size());
  const double total = c ? static_cast<double>(c->total) : 0.0;
  const double denom = total + alpha_ * v;
  std::vector<double> dist(vocab_size(), alpha_ / denom);
  if (c) {
    for (const auto& [idx, n] : c->next) dist[idx] = (static_cast<double>(n) + alpha_) / denom;
  }
  return dist;
}

double NGramModel::probability(std::u32string_view context, char32_t next) const {
  const Counts* c = lookup(resolve_context(context));
  const double v = static_cast<double>(vocab_size());
  const double total = c ? static_cast<double>(c->total) : 0.0;
  double n = 0.0;
  if (c) {
    const std::uint32_t idx = vocab_index(next);
    const auto it =
        std::lower_bound(c->next.begin(), c->next.end(), std::make_pair(idx, std::uint64_t{0}));
    if (it != c->next.end() && it->first == idx) n = static_cast<double>(it->second);
  }
  return (n + alpha_) / (total + alpha_ * v);
}

TokenProbSequence NGramModel::score_sequence(std::string_view context, std::string_view target) const {
  const std::u32string tgt = decode_utf8(target);
  if (tgt.empty()) throw LengthError("cannot score an empty target");
  std::u32string running = decode_utf8(context);
  if (running.size() > order_) running.erase(0, running.size() - order_);
  TokenProbSequence seq;
  seq.tokens.reserve(tgt.size());
  seq.probs.reserve(tgt.size());
  for (char32_t c : tgt) {
    seq.tokens.push_back(encode_utf8(std::u32string_view(&c, 1)));
    seq.probs.push_back(probability(running, c));
    running.push_back(c);
    if (running.size() > order_) running.erase(0, 1);
  }
  return seq;
}

namespace {

// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

GenerationRecord NGramModel::sample_completions(std::string_view pair_id, std::string_view context,
                                                std::size_t n_samples, std::size_t max_chars,
                                                double temperature, double top_p,
                                                std::uint64_t seed) const {
  if (temperature < 0.0) throw DomainError("temperature must be >= 0");
  if (!(top_p > 0.0 && top_p <= 1.0)) throw DomainError("top_p must lie in (0, 1]");
  GenerationRecord rec;
  rec.pair_id = std::string(pair_id);
  rec.decoding.temperature = temperature;
  rec.decoding.top_p = top_p;
  rec.decoding.max_new_tokens = max_chars;

  std::u32string prompt = decode_utf8(context);
  if (prompt.size() > order_) prompt.erase(0, prompt.size() - order_);
  const std::uint64_t pair_hash = murmur3_128(pair_id, seed).lo;
  const std::size_t sampleable = vocab_.size();  // the unseen slot is never emitted

  std::vector<std::uint32_t> order(sampleable);
  std::vector<double> weight(sampleable);
  for (std::size_t s = 0; s < n_samples; ++s) {
    std::mt19937_64 rng(mix64(seed ^ mix64(pair_hash + s + 1)));
    std::u32string running = prompt;
    std::u32string out;
    for (std::size_t step = 0; step < max_chars; ++step) {
      const std::vector<double> dist = distribution(running);
      std::uint32_t pick = 0;
      if (temperature == 0.0) {
        pick = static_cast<std::uint32_t>(
            std::max_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(sampleable)) -
            dist.begin());
      } else {
        double max_log = -INFINITY;
        for (std::size_t i = 0; i < sampleable; ++i) max_log = std::max(max_log, std::log(dist[i]));
        double total = 0.0;
        for (std::size_t i = 0; i < sampleable; ++i) {
          weight[i] = std::exp((std::log(dist[i]) - max_log) / temperature);
          total += weight[i];
        }
        std::iota(order.begin(), order.end(), 0u);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::uint32_t a, std::uint32_t b) { return weight[a] > weight[b]; });
        std::size_t keep = 0;
        double kept = 0.0;
        while (keep < sampleable) {
          kept += weight[order[keep]];
          ++keep;
          if (kept >= top_p * total) break;
        }
        const double u = uniform01(rng) * kept;
        double acc = 0.0;
        pick = order[keep - 1];
        for (std::size_t i = 0; i < keep; ++i) {
          acc += weight[order[i]];
          if (u < acc) {
            pick = order[i];
            break;
          }
        }
      }
      const char32_t c = vocab_[pick];
      out.push_back(c);
      running.push_back(c);
      if (running.size() > order_) running.erase(0, 1);
    }
    rec.completions.push_back(encode_utf8(out));
  }
  return rec;
}

std::string NGramModel::identity() const {
  std::ostringstream ss;
  ss << "refmodel-char" << order_ << "-a" << alpha_;
  return ss.str();
}

namespace {
constexpr std::string_view kModelMagic = "XPNM";
constexpr std::uint16_t kModelVersion = 1;
}  // namespace

std::vector<std::uint8_t> NGramModel::serialize() const {
  ByteWriter w;
  w.put_bytes(kModelMagic);
  w.put_u16(kModelVersion);
  w.put_u32(static_cast<std::uint32_t>(order_));
  w.put_f64(alpha_);
  w.put_u64(seed_);
  w.put_u32(static_cast<std::uint32_t>(vocab_.size()));
  for (char32_t c : vocab_) w.put_u32(c);
  std::vector<const std::pair<const std::u32string, Counts>*> entries;
  entries.reserve(table_.size());
  for (const auto& e : table_) entries.push_back(&e);
  std::sort(entries.begin(), entries.end(), [](auto* a, auto* b) { return a->first < b->first; });
  w.put_u64(entries.size());
  for (const auto* e : entries) {
    w.put_u32(static_cast<std::uint32_t>(e->first.size()));
    for (char32_t c : e->first) w.put_u32(c);
    w.put_u32(static_cast<std::uint32_t>(e->second.next.size()));
    for (const auto& [idx, n] : e->second.next) {
      w.put_u32(idx);
      w.put_u64(n);
    }
  }
  w.put_u32(crc32_of(w.buffer()));
  return std::move(w.buffer());
}

NGramModel NGramModel::deserialize(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kModelMagic.size() + 2 + 4 ||
      std::string_view(reinterpret_cast<const char*>(bytes.data()), kModelMagic.size()) != kModelMagic) {
    throw FormatError("not a reference-model file (bad magic)");
  }
  ByteReader r(bytes.first(bytes.size() - 4));
  r.get_bytes(kModelMagic.size());
  const std::uint16_t version = r.get_u16();
  if (version != kModelVersion) {
    throw FormatError("unsupported reference-model format version " + std::to_string(version));
  }
  if (ByteReader(bytes.last(4)).get_u32() != crc32_of(bytes.first(bytes.size() - 4))) {
    throw ChecksumError("reference-model checksum mismatch");
  }
  NGramModel m;
  m.order_ = r.get_u32();
  m.alpha_ = r.get_f64();
  m.seed_ = r.get_u64();
  const std::uint32_t nv = r.get_u32();
  for (std::uint32_t i = 0; i < nv; ++i) m.vocab_.push_back(r.get_u32());
  const std::uint64_t ne = r.get_u64();
  m.table_.reserve(ne);
  for (std::uint64_t i = 0; i < ne; ++i) {
    std::u32string ctx;
    const std::uint32_t len = r.get_u32();
    for (std::uint32_t k = 0; k < len; ++k) ctx.push_back(r.get_u32());
    Counts c;
    const std::uint32_t nn = r.get_u32();
    for (std::uint32_t k = 0; k < nn; ++k) {
      const std::uint32_t idx = r.get_u32();
      const std::uint64_t n = r.get_u64();
      c.next.emplace_back(idx, n);
      c.total += n;
    }
    m.table_.emplace(std::move(ctx), std::move(c));
  }
  return m;
}

void save_model_file(const NGramModel& model, const std::filesystem::path& path) {
  write_binary_file(path, model.serialize());
}

NGramModel load_model_file(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError("model file not found: " + path.string());
  return NGramModel::deserialize(read_binary_file(path));
}

std::vector<ScoreRequest> score_requests(std::span<const BugFixPair> pairs) {
  std::vector<ScoreRequest> out;
  out.reserve(pairs.size() * 2);
  for (const auto& p : pairs) {
    out.push_back({p.pair_id, Variant::kBug, p.context_before, p.bug_text});
    out.push_back({p.pair_id, Variant::kFix, p.context_before, p.fix_text});
  }
  return out;
}

std::vector<TokenProbSequence> score_batch(const NGramModel& model,
                                           std::span<const ScoreRequest> requests) {
  std::vector<TokenProbSequence> out(requests.size());
  const auto n = static_cast<std::int64_t>(requests.size());
#pragma omp parallel for schedule(dynamic, 4) num_threads(jobs())
  for (std::int64_t i = 0; i < n; ++i) {
    out[i] = model.score_sequence(requests[i].context, requests[i].target);
    out[i].pair_id = requests[i].pair_id;
    out[i].variant = requests[i].variant;
  }
  return out;
}

std::vector<GenerationRecord> generate_batch(const NGramModel& model,
                                             std::span<const BugFixPair> pairs,
                                             const GenerateOptions& options) {
  std::vector<GenerationRecord> out(pairs.size());
  const auto n = static_cast<std::int64_t>(pairs.size());
#pragma omp parallel for schedule(dynamic, 2) num_threads(jobs())
  for (std::int64_t i = 0; i < n; ++i) {
    // Keep only the most recent characters of the prompt.
    std::string_view ctx = pairs[i].context_before;
    const std::u32string cps = decode_utf8(ctx);
    std::string trimmed;
    if (cps.size() > options.context_limit) {
      trimmed = encode_utf8(std::u32string_view(cps).substr(cps.size() - options.context_limit));
      ctx = trimmed;
    }
    out[i] = model.sample_completions(pairs[i].pair_id, ctx, options.n_samples, options.max_chars,
                                      options.temperature, options.top_p, options.seed);
    out[i].decoding.context_limit = options.context_limit;
  }
  return out;
}

}  // namespace xprobe
