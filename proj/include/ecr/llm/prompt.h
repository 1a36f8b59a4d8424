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

#ifndef ECR_LLM_PROMPT_H_
#define ECR_LLM_PROMPT_H_

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"

namespace ecr::llm {

// Prompt operators: synonym generation, coreferential and non-coreferential
// mention generation, context paraphrase, temporal-commonsense context.
enum class OperatorKind { kSyn, kCe, kNce, kPara, kTc };

std::string_view OperatorName(OperatorKind kind);

// Shape of the answer a template asks for; selects the response parser.
enum class ResponseFormat {
  kGeneration,   // "Expressions: a, b" then numbered mentions
  kMentionList,  // numbered mentions only
  kContexts,     // "Prefix:"/"Suffix:" headed numbered lists
};

using SlotMap = std::map<std::string, std::string, std::less<>>;

// A fixed demonstration block followed by an instruction body with named
// {slot} placeholders. Every placeholder in the body is a declared slot.
class PromptTemplate {
 public:
  static absl::StatusOr<PromptTemplate> Create(
      std::string name, std::vector<OperatorKind> operators,
      std::vector<std::string> slots, std::string demonstration,
      std::string body, ResponseFormat format);

  const std::string& name() const { return name_; }
  const std::vector<OperatorKind>& operators() const { return operators_; }
  const std::vector<std::string>& slots() const { return slots_; }
  const std::string& demonstration() const { return demonstration_; }
  const std::string& body() const { return body_; }
  ResponseFormat format() const { return format_; }

  // Demonstration (verbatim), a blank line, then the body with every slot
  // substituted. A missing slot is an InvalidArgument error naming it.
  absl::StatusOr<std::string> Render(const SlotMap& slots) const;

 private:
  std::string name_;
  std::vector<OperatorKind> operators_;
  std::vector<std::string> slots_;
  std::string demonstration_;
  std::string body_;
  ResponseFormat format_ = ResponseFormat::kGeneration;
};

// Shipped templates, by name:
//   syn_nce  synonyms + non-coreferential mentions  (slots: trigger, sentence)
//   syn_ce   synonyms + coreferential mentions      (slots: trigger, sentence)
//   nce      non-coreferential mentions keeping the trigger
//   ce       coreferential mentions keeping the trigger
//   para     prefix/suffix paraphrase   (slots: snippet, prefix, mention, suffix)
//   tc       temporal prefix/suffix     (slots: sentence, trigger)
// Null for an unknown name.
const PromptTemplate* FindBuiltinTemplate(std::string_view name);
const std::vector<std::string>& BuiltinTemplateNames();

}  // namespace ecr::llm

#endif  // ECR_LLM_PROMPT_H_
