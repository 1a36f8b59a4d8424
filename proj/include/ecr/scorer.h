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

#ifndef ECR_SCORER_H_
#define ECR_SCORER_H_

#include <chrono>
#include <cstddef>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "ecr/pairing.h"
#include "json.hpp"

namespace ecr {

// A window as the external scorer sees it: text plus trigger byte span.
struct ScoreWindow {
  std::string text;
  size_t begin = 0;
  size_t end = 0;
  std::string head_lemma;  // local only; never sent on the wire
};

struct ScoreRequest {
  std::string pair_id;
  ScoreWindow first;
  ScoreWindow second;

  // Span inside its text and non-empty, on both sides.
  absl::Status Validate() const;
  nlohmann::json ToJson() const;
};

ScoreRequest MakeScoreRequest(const MentionPair& pair);

struct ScoreResult {
  std::string pair_id;
  double score = 0.0;
  friend bool operator==(const ScoreResult&, const ScoreResult&) = default;
};

// 1.0 iff the case-folded head lemmas match. A side without a head lemma
// falls back to its trigger text.
ScoreResult LemmaBaselineScore(const MentionPair& pair);
ScoreResult LemmaBaselineScore(const ScoreRequest& request);

inline constexpr size_t kDefaultScoreBatchSize = 32;
inline constexpr int kDefaultScoreInFlight = 2;

struct ExternalScorerOptions {
  std::string endpoint;  // e.g. http://127.0.0.1:8080 ; requests go to /score
  size_t batch_size = kDefaultScoreBatchSize;
  int max_in_flight = kDefaultScoreInFlight;
  std::chrono::milliseconds timeout{30000};
};

// POSTs the requests in batches. The outer status fails only for unusable
// input (empty list, duplicate pair ids, bad endpoint). Each item carries
// its own status: a transport failure (after one retry), a protocol error
// quoting the offending payload, or a validation error for a score outside
// [0, 1]. Results follow request order.
absl::StatusOr<std::vector<absl::StatusOr<ScoreResult>>> ExternalScoreBatch(
    const std::vector<ScoreRequest>& requests,
    const ExternalScorerOptions& options);

}  // namespace ecr

#endif  // ECR_SCORER_H_
