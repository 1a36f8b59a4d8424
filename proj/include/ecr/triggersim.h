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

#ifndef ECR_TRIGGERSIM_H_
#define ECR_TRIGGERSIM_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "ecr/pairing.h"
#include "json.hpp"

namespace ecr {

inline constexpr int kDefaultSimilarityThreshold = 80;

enum class EditMetric {
  // Insertions and deletions cost 1, substitutions 2 (fuzz "ratio").
  kIndel,
  // Unit-cost Levenshtein; kept for sensitivity analysis.
  kLevenshtein,
};

// Unicode code points of a UTF-8 string. Invalid bytes map to themselves.
std::vector<char32_t> DecodeUtf8(std::string_view text);

// Edit distance between two code point sequences under `metric`.
int64_t EditDistance(std::u32string_view a, std::u32string_view b,
                     EditMetric metric);

// round(100 * (|a| + |b| - d(a, b)) / (|a| + |b|)) over code points, rounding
// half to even. Symmetric; identical strings give 100. Empty input is an
// InvalidArgument error.
absl::StatusOr<int> FuzzRatio(std::string_view a, std::string_view b,
                              EditMetric metric = EditMetric::kIndel);

// Lexical trigger-match feature of a mention pair.
struct LexicalSimilarityClass {
  int ratio = 0;
  bool is_similar = false;
};

// Maps a window's trigger to the form that gets compared.
class TriggerNormalizer {
 public:
  virtual ~TriggerNormalizer() = default;
  virtual std::string Normalize(const DiscourseWindow& window) const = 0;
};

// Lowercased stored head lemma, falling back to the lowercased surface
// trigger when no lemma is present.
class HeadLemmaNormalizer : public TriggerNormalizer {
 public:
  std::string Normalize(const DiscourseWindow& window) const override;
};

// Lowercased surface trigger.
class SurfaceNormalizer : public TriggerNormalizer {
 public:
  std::string Normalize(const DiscourseWindow& window) const override;
};

absl::StatusOr<LexicalSimilarityClass> ClassifyPairTriggers(
    const MentionPair& pair, const TriggerNormalizer& normalizer,
    int threshold = kDefaultSimilarityThreshold,
    EditMetric metric = EditMetric::kIndel);

struct BiasHistogram {
  int64_t coref_similar = 0;
  int64_t coref_divergent = 0;
  int64_t not_coref_similar = 0;
  int64_t not_coref_divergent = 0;
  // similar-coref / all-coref; absent when there are no coreferential pairs.
  std::optional<double> percent_similar_coref;
  // Mean fuzz ratio over coreferential pairs.
  std::optional<double> mean_ratio_coref;

  int64_t Total() const {
    return coref_similar + coref_divergent + not_coref_similar +
           not_coref_divergent;
  }
  // Rows of (label, class, count).
  std::string ToCsv() const;
  nlohmann::json ToJson() const;
};

// Fails on an empty dataset.
absl::StatusOr<BiasHistogram> ComputeBiasHistogram(
    const std::vector<MentionPair>& pairs, const TriggerNormalizer& normalizer,
    int threshold = kDefaultSimilarityThreshold,
    EditMetric metric = EditMetric::kIndel);

}  // namespace ecr

#endif  // ECR_TRIGGERSIM_H_
