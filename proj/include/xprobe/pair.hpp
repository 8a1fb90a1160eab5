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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace xprobe {

enum class Variant { kBug, kFix };

std::string_view variant_name(Variant v);  // "bug" / "fix"
std::optional<Variant> parse_variant(std::string_view s);

// One single-statement bug and its fix.  Both variants share the preceding
// context; the optional source files hold the full pre- and post-fix text.
struct BugFixPair {
  std::string pair_id;
  std::string bug_text;
  std::string fix_text;
  std::string context_before;
  std::string bug_category = "OTHER";
  std::uint64_t commits_until_fix = 0;
  std::optional<std::string> source_file_bug;
  std::optional<std::string> source_file_fix;

  const std::string& text(Variant v) const { return v == Variant::kBug ? bug_text : fix_text; }
  const std::optional<std::string>& source_file(Variant v) const {
    return v == Variant::kBug ? source_file_bug : source_file_fix;
  }
};

enum class ExposureCategory { kNeither, kBoth, kOnlyBug, kOnlyFix };

inline constexpr std::array<ExposureCategory, 4> kAllCategories = {
    ExposureCategory::kNeither, ExposureCategory::kBoth, ExposureCategory::kOnlyBug,
    ExposureCategory::kOnlyFix};

// Truth table over the two seen flags.
constexpr ExposureCategory category_from_seen(bool bug_seen, bool fix_seen) {
  if (bug_seen && fix_seen) return ExposureCategory::kBoth;
  if (bug_seen) return ExposureCategory::kOnlyBug;
  if (fix_seen) return ExposureCategory::kOnlyFix;
  return ExposureCategory::kNeither;
}

// Identifier used in JSON files: "Neither", "Both", "OnlyBug", "OnlyFix".
std::string_view category_id(ExposureCategory c);
std::optional<ExposureCategory> parse_category(std::string_view s);
// Row label of the exposure table: "Neither seen", ..., "Only Fix".
std::string_view category_label(ExposureCategory c);

// The sixteen single-statement bug patterns.  Labels are upper-cased with
// spaces mapped to underscores; anything else becomes "OTHER".
std::string normalize_bug_category(std::string_view label);

}  // namespace xprobe
