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

#ifndef ECR_AUGMENT_H_
#define ECR_AUGMENT_H_

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "ecr/llm/client.h"
#include "ecr/pairing.h"
#include "json.hpp"

namespace ecr {

enum class AugmentKind { kCad, kTia, kCia, kTad };

std::string_view AugmentKindName(AugmentKind kind);  // "cad", "tia", ...
absl::StatusOr<AugmentKind> ParseAugmentKind(std::string_view name);

enum class Segment {
  kFirstPrefix,
  kFirstCenter,
  kFirstSuffix,
  kSecondPrefix,
  kSecondCenter,
  kSecondSuffix,
};

std::string_view SegmentName(Segment segment);  // "first.prefix", ...
absl::StatusOr<Segment> ParseSegment(std::string_view name);

struct EditRecord {
  Segment segment;
  std::string action;  // "generate", "paraphrase" or "temporal"
  friend bool operator==(const EditRecord&, const EditRecord&) = default;
};

struct AugmentedPair {
  MentionPair pair;  // label already flipped
  AugmentKind kind = AugmentKind::kCad;
  std::string source_pair_id;
  std::vector<EditRecord> edit_ledger;  // in segment order
  double plausibility = 0.0;

  bool Modified(Segment segment) const;

  nlohmann::json ToJson() const;
  static absl::StatusOr<AugmentedPair> FromJson(const nlohmann::json& json);
  friend bool operator==(const AugmentedPair&, const AugmentedPair&) = default;
};

std::string SerializeAugmented(const std::vector<AugmentedPair>& pairs);
absl::StatusOr<std::vector<AugmentedPair>> ParseAugmented(
    std::string_view jsonl);

// Windows wrapped in <s>...</s>, one per line, for reading generated data.
std::string DumpPair(const MentionPair& pair);

// 1 - (token Levenshtein distance / longer length) over the concatenated
// first+second window tokens. Two empty sequences score 1.
double PlausibilityProxy(const MentionPair& source, const MentionPair& aug);

using PlausibilityFn =
    std::function<double(const MentionPair& source, const MentionPair& aug)>;

struct AugmentOptions {
  std::string model = "gpt-3.5-turbo";
  double temperature = 0.0;
  // Replaces the proxy, e.g. with an external MoverScore.
  PlausibilityFn plausibility;
};

struct GenerationStats {
  int64_t candidates = 0;          // sentences the LLM returned
  int64_t dropped_parse = 0;       // unusable responses (per candidate)
  int64_t dropped_constraint = 0;  // missing synonym or original trigger
  std::vector<std::string> warnings;
  void Merge(const GenerationStats& other);
};

struct GenerationResult {
  std::vector<AugmentedPair> pairs;
  GenerationStats stats;
};

// Malformed generations are dropped and counted; transport failures and
// refusals are returned as errors.
absl::StatusOr<GenerationResult> GenerateAugmentations(
    AugmentKind kind, const MentionPair& source, llm::LlmClient& client,
    const AugmentOptions& options = {});

// Runs GenerateAugmentations over `sources` on up to `threads` workers.
// Output follows source order.
absl::StatusOr<GenerationResult> GenerateForDataset(
    AugmentKind kind, const std::vector<MentionPair>& sources,
    llm::LlmClient& client, const AugmentOptions& options = {},
    int threads = 1);

struct AugmentationPlan {
  int per_original = 2;
  int top_n = kDefaultInferenceNeighbors;  // eligible iff rank <= top_n
  uint64_t seed = 0;

  // per_original and top_n must be >= 1.
  static absl::StatusOr<AugmentationPlan> Create(int per_original, int top_n,
                                                 uint64_t seed);
};

bool IsEligible(const MentionPair& source, const AugmentationPlan& plan);

struct MixResult {
  PairDataset dataset;                // originals, then chosen augmentations
  std::vector<AugmentedPair> chosen;  // grouped by source in original order
};

// Every augmentation must name a source in `ori`. Sources are visited in
// order; each eligible one keeps at most plan.per_original of its
// augmentations, picked uniformly at random from a generator seeded by
// plan.seed.
absl::StatusOr<MixResult> MixDataset(const PairDataset& ori,
                                     const std::vector<AugmentedPair>& augs,
                                     const AugmentationPlan& plan);

}  // namespace ecr

#endif  // ECR_AUGMENT_H_
