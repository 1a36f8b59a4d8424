// Copyright 2026 The ecrcad Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ecr/llm/response_parser.h"

#include <cctype>
#include <optional>

#include "absl/strings/str_cat.h"
#include "ecr/strings.h"

namespace ecr::llm {
namespace {

absl::Status ParseError(std::string_view what, std::string_view raw) {
  return absl::InvalidArgumentError(
      absl::StrCat(AbslSv(what), "; raw response: ", AbslSv(raw)));
}

// "12. text" -> "text" (trimmed); nullopt for anything else.
std::optional<std::string_view> NumberedItem(std::string_view line) {
  line = StripWhitespace(line);
  size_t i = 0;
  while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) {
    ++i;
  }
  if (i == 0 || i >= line.size() || line[i] != '.') return std::nullopt;
  std::string_view rest = StripWhitespace(line.substr(i + 1));
  if (rest.empty()) return std::nullopt;
  return rest;
}

// Removes one layer of matching quotes around an item.
std::string_view Unquote(std::string_view s) {
  s = StripWhitespace(s);
  if (s.size() >= 2) {
    const char a = s.front();
    const char b = s.back();
    if ((a == '\'' && b == '\'') || (a == '"' && b == '"') ||
        (a == '`' && b == '\'')) {
      return StripWhitespace(s.substr(1, s.size() - 2));
    }
  }
  return s;
}

bool StartsWithNoCase(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[i])) !=
        std::tolower(static_cast<unsigned char>(prefix[i]))) {
      return false;
    }
  }
  return true;
}

}  // namespace

absl::StatusOr<GenerationBundle> ParseGeneration(std::string_view raw) {
  GenerationBundle bundle;
  bool saw_expressions = false;
  for (std::string_view line : SplitSv(raw, '\n')) {
    std::string_view t = StripWhitespace(line);
    if (!saw_expressions && StartsWithNoCase(t, "Expressions:")) {
      saw_expressions = true;
      for (std::string_view piece :
           SplitSv(t.substr(std::string_view("Expressions:").size()), ',')) {
        piece = StripWhitespace(piece);
        while (!piece.empty() && piece.back() == '.') piece.remove_suffix(1);
        piece = Unquote(piece);
        if (!piece.empty()) bundle.synonyms.emplace_back(piece);
      }
      continue;
    }
    if (auto item = NumberedItem(t)) {
      bundle.mention_sentences.emplace_back(Unquote(*item));
    }
  }
  if (!saw_expressions || bundle.synonyms.empty()) {
    return ParseError("no \"Expressions:\" line", raw);
  }
  if (bundle.mention_sentences.empty()) {
    return ParseError("no numbered mention lines", raw);
  }
  return bundle;
}

absl::StatusOr<std::vector<std::string>> ParseMentionList(
    std::string_view raw) {
  std::vector<std::string> out;
  for (std::string_view line : SplitSv(raw, '\n')) {
    if (auto item = NumberedItem(line)) out.emplace_back(Unquote(*item));
  }
  if (out.empty()) return ParseError("no numbered mention lines", raw);
  return out;
}

absl::StatusOr<ContextVariants> ParseParaphrases(std::string_view raw,
                                                 bool require_prefix,
                                                 bool require_suffix) {
  enum class Section { kNone, kPrefix, kSuffix };
  Section section = Section::kNone;
  bool saw_prefix = false;
  bool saw_suffix = false;
  ContextVariants out;
  for (std::string_view line : SplitSv(raw, '\n')) {
    std::string_view t = StripWhitespace(line);
    // A header line is the header word, a colon and at most trailing text.
    if (StartsWithNoCase(t, "Prefixes:") || StartsWithNoCase(t, "Prefix:")) {
      section = Section::kPrefix;
      saw_prefix = true;
      continue;
    }
    if (StartsWithNoCase(t, "Suffixes:") || StartsWithNoCase(t, "Suffix:")) {
      section = Section::kSuffix;
      saw_suffix = true;
      continue;
    }
    auto item = NumberedItem(t);
    if (!item) continue;
    std::string_view text = Unquote(*item);
    if (text.empty()) continue;
    if (section == Section::kPrefix) out.prefixes.emplace_back(text);
    if (section == Section::kSuffix) out.suffixes.emplace_back(text);
  }
  if (require_prefix && !saw_prefix) return ParseError("no Prefix header", raw);
  if (require_suffix && !saw_suffix) return ParseError("no Suffix header", raw);
  if (require_prefix && out.prefixes.empty()) {
    return ParseError("no numbered prefix variants", raw);
  }
  if (require_suffix && out.suffixes.empty()) {
    return ParseError("no numbered suffix variants", raw);
  }
  return out;
}

}  // namespace ecr::llm
