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

#ifndef ECR_PAIRING_H_
#define ECR_PAIRING_H_

#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "ecr/corpus.h"
#include "json.hpp"

namespace ecr {

inline constexpr int kDefaultWindowRadius = 2;
inline constexpr int kDefaultTrainNeighbors = 15;
inline constexpr int kDefaultInferenceNeighbors = 5;

// Up to 2w+1 sentences of discourse around one mention. The trigger is
// located by byte offsets into `center`.
struct DiscourseWindow {
  std::string mention_id;
  std::vector<std::string> prefix;
  std::string center;
  std::vector<std::string> suffix;
  int w = kDefaultWindowRadius;
  size_t trigger_begin = 0;
  size_t trigger_end = 0;
  std::string head_lemma;

  std::string_view trigger() const;

  // Segments joined by single spaces: prefix..., center, suffix...
  std::string Text() const;

  // Byte offset of the trigger within Text().
  size_t TriggerOffsetInText() const;

  // Whitespace tokens of Text().
  std::vector<std::string> Tokens() const;

  nlohmann::json ToJson() const;
  static absl::StatusOr<DiscourseWindow> FromJson(const nlohmann::json& json);

  friend bool operator==(const DiscourseWindow&,
                         const DiscourseWindow&) = default;
};

enum class PairLabel { kCoref, kNotCoref };

std::string_view PairLabelName(PairLabel label);
absl::StatusOr<PairLabel> ParsePairLabel(std::string_view name);
inline PairLabel Flip(PairLabel label) {
  return label == PairLabel::kCoref ? PairLabel::kNotCoref : PairLabel::kCoref;
}

struct MentionPair {
  std::string pair_id;
  DiscourseWindow first;
  DiscourseWindow second;
  PairLabel label = PairLabel::kNotCoref;
  // 1-based position of `second` in the anchor's neighbor list; 0 if unknown.
  int rank = 0;

  nlohmann::json ToJson() const;
  static absl::StatusOr<MentionPair> FromJson(const nlohmann::json& json);

  friend bool operator==(const MentionPair&, const MentionPair&) = default;
};

struct PairDataset {
  std::vector<MentionPair> pairs;
  int k_train = kDefaultTrainNeighbors;
  int k_infer = kDefaultInferenceNeighbors;
  // Anchors with fewer than k candidates in scope.
  std::vector<std::string> short_anchors;
};

// Fails on duplicate pair ids.
absl::Status CheckPairIdsUnique(const std::vector<MentionPair>& pairs);

std::string SerializePairs(const std::vector<MentionPair>& pairs);
absl::StatusOr<std::vector<MentionPair>> ParsePairs(std::string_view jsonl);

// Window of radius w around a mention. Truncates at document boundaries.
absl::StatusOr<DiscourseWindow> ExtractWindow(const Corpus& corpus,
                                              std::string_view mention_id,
                                              int w);

// Pairwise mention similarity used for neighbor retrieval.
class SimilarityPlugin {
 public:
  virtual ~SimilarityPlugin() = default;
  virtual double Score(const Mention& a, const Mention& b) const = 0;
};

// Number of distinct content tokens shared by the two mentions' discourse
// windows. Tokens are lowercased; stopwords and tokens without letters or
// digits are ignored.
class TokenOverlapSimilarity : public SimilarityPlugin {
 public:
  TokenOverlapSimilarity(const Corpus& corpus, int w);
  double Score(const Mention& a, const Mention& b) const override;

  static bool IsStopword(std::string_view lowercase_token);

 private:
  std::map<std::string, std::set<std::string>, std::less<>> content_;
};

enum class RetrievalScope { kWithinTopic, kCorpusWide };

struct Neighbors {
  std::vector<std::string> mention_ids;  // descending similarity
  std::vector<double> scores;
  bool is_short = false;  // fewer than k candidates existed
};

// The k most similar mentions to `anchor`, excluding the anchor itself.
// Ties are broken by ascending mention id.
absl::StatusOr<Neighbors> RetrieveNearest(
    const Corpus& corpus, std::string_view anchor, int k,
    const SimilarityPlugin& sim,
    RetrievalScope scope = RetrievalScope::kWithinTopic);

struct PairingOptions {
  int k_train = kDefaultTrainNeighbors;
  int k_infer = kDefaultInferenceNeighbors;
  int w = kDefaultWindowRadius;
  RetrievalScope scope = RetrievalScope::kWithinTopic;
};

// One pair per (anchor, neighbor), anchors in id order. Training corpora use
// k_train neighbors per anchor, dev/test corpora k_infer.
absl::StatusOr<PairDataset> BuildPairDataset(const Corpus& corpus,
                                             const PairingOptions& options,
                                             const SimilarityPlugin& sim);

}  // namespace ecr

#endif  // ECR_PAIRING_H_
