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

#ifndef ECR_LLM_RESPONSE_PARSER_H_
#define ECR_LLM_RESPONSE_PARSER_H_

#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"

namespace ecr::llm {

struct GenerationBundle {
  std::vector<std::string> synonyms;
  std::vector<std::string> mention_sentences;
};

// "Expressions: a, b, c" plus numbered "N. sentence" lines. Errors carry the
// raw response.
absl::StatusOr<GenerationBundle> ParseGeneration(std::string_view raw);

// Numbered "N. sentence" lines only; at least one required.
absl::StatusOr<std::vector<std::string>> ParseMentionList(std::string_view raw);

struct ContextVariants {
  std::vector<std::string> prefixes;
  std::vector<std::string> suffixes;
};

// Numbered lists under "Prefix:"/"Prefixes:" and "Suffix:"/"Suffixes:"
// headers, in either order. Items lose wrapping quotes. A required list that
// is missing or empty is an error.
absl::StatusOr<ContextVariants> ParseParaphrases(std::string_view raw,
                                                 bool require_prefix = true,
                                                 bool require_suffix = true);

}  // namespace ecr::llm

#endif  // ECR_LLM_RESPONSE_PARSER_H_
