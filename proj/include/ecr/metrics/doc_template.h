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

#ifndef ECR_METRICS_DOC_TEMPLATE_H_
#define ECR_METRICS_DOC_TEMPLATE_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "ecr/cluster_set.h"
#include "ecr/corpus.h"
#include "json.hpp"

namespace ecr::metrics {

struct GoldSpan {
  std::string mention_id;
  size_t begin = 0;  // byte offsets into DocTemplateInput::text
  size_t end = 0;
  std::string cluster_id;
};

// The text shown to the model and where the gold mentions sit in it.
struct DocTemplateInput {
  std::string input_id;
  std::string text;
  std::vector<GoldSpan> gold;  // sorted by begin
};

// Joins the documents' sentences with single spaces (documents separated by a
// blank line). Mentions are ordered by position.
absl::StatusOr<DocTemplateInput> BuildDocTemplateInput(
    const Corpus& corpus, std::string input_id,
    const std::vector<std::string>& doc_ids);

// The instruction followed by the text with each gold mention written as
// "[mention](#)". A mention overlapping an earlier one is left unmarked.
std::string RenderDocTemplatePrompt(const DocTemplateInput& input);

struct LlmErrorTaxonomy {
  size_t missing_type1 = 0;  // gold mention tagged with an empty id
  size_t missing_type2 = 0;  // gold mention left untagged
  size_t redundant = 0;      // tag that matches no gold mention
  size_t wrong_prediction = 0;

  LlmErrorTaxonomy& operator+=(const LlmErrorTaxonomy& other);
  nlohmann::json ToJson() const;
};

struct TaggedMention {
  std::string mention_id;
  std::optional<std::string> cluster;  // absent for both kinds of miss
};

struct RedundantTag {
  std::string text;
  std::string cluster;
};

struct DocTemplateAnnotation {
  std::vector<TaggedMention> mentions;  // one per gold mention, gold order
  std::vector<RedundantTag> redundant;
  LlmErrorTaxonomy errors;
};

// Extracts the "[text](#id)" tags, aligns the untagged response text to the
// input and matches tags to gold spans. An empty response or an unterminated
// tag is InvalidArgument.
absl::StatusOr<DocTemplateAnnotation> ParseDocTemplate(
    const DocTemplateInput& input, std::string_view raw);

// Response clustering over the gold mentions: tagged mentions grouped by id
// (scoped by input_id), everything else a singleton. Redundant tags never
// enter the universe.
absl::StatusOr<ClusterSet> ResponseClustering(
    const DocTemplateInput& input, const DocTemplateAnnotation& annotation);

}  // namespace ecr::metrics

#endif  // ECR_METRICS_DOC_TEMPLATE_H_
