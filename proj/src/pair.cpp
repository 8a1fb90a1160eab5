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

#include "xprobe/pair.hpp"

#include <algorithm>
#include <cctype>

namespace xprobe {

std::string_view variant_name(Variant v) { return v == Variant::kBug ? "bug" : "fix"; }

std::optional<Variant> parse_variant(std::string_view s) {
  if (s == "bug") return Variant::kBug;
  if (s == "fix") return Variant::kFix;
  return std::nullopt;
}

std::string_view category_id(ExposureCategory c) {
  switch (c) {
    case ExposureCategory::kNeither: return "Neither";
    case ExposureCategory::kBoth: return "Both";
    case ExposureCategory::kOnlyBug: return "OnlyBug";
    case ExposureCategory::kOnlyFix: return "OnlyFix";
  }
  return "Neither";
}

std::optional<ExposureCategory> parse_category(std::string_view s) {
  for (auto c : kAllCategories) {
    if (category_id(c) == s) return c;
  }
  return std::nullopt;
}

std::string_view category_label(ExposureCategory c) {
  switch (c) {
    case ExposureCategory::kNeither: return "Neither seen";
    case ExposureCategory::kBoth: return "Both seen";
    case ExposureCategory::kOnlyBug: return "Only Bug";
    case ExposureCategory::kOnlyFix: return "Only Fix";
  }
  return "Neither seen";
}

std::string normalize_bug_category(std::string_view label) {
  static constexpr std::array<std::string_view, 16> kPatterns = {
      "CHANGE_IDENTIFIER",       "CHANGE_NUMERAL",
      "CHANGE_OPERATOR",         "CHANGE_OPERAND",
      "CHANGE_UNARY_OPERATOR",   "CHANGE_CALLER_IN_FUNCTION_CALL",
      "CHANGE_MODIFIER",         "DIFFERENT_METHOD_SAME_ARGS",
      "OVERLOAD_METHOD_MORE_ARGS", "OVERLOAD_METHOD_DELETED_ARGS",
      "LESS_SPECIFIC_IF",        "MORE_SPECIFIC_IF",
      "SWAP_ARGUMENTS",          "SWAP_BOOLEAN_LITERAL",
      "ADD_THROWS_EXCEPTION",    "DELETE_THROWS_EXCEPTION",
  };
  std::string key;
  key.reserve(label.size());
  for (char c : label) {
    key.push_back(c == ' ' || c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  if (std::find(kPatterns.begin(), kPatterns.end(), key) != kPatterns.end()) return key;
  return "OTHER";
}

}  // namespace xprobe
