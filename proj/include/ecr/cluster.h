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

#ifndef ECR_CLUSTER_H_
#define ECR_CLUSTER_H_

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "ecr/cluster_set.h"
#include "ecr/corpus.h"
#include "json.hpp"

namespace ecr {

inline constexpr double kDefaultMergeThreshold = 0.5;

// A scored mention pair, in stored (first, second) orientation.
struct ScoredEdge {
  std::string pair_id;
  std::string first;
  std::string second;
  double score = 0.0;

  nlohmann::json ToJson() const;
  static absl::StatusOr<ScoredEdge> FromJson(const nlohmann::json& json);
  friend bool operator==(const ScoredEdge&, const ScoredEdge&) = default;
};

std::string SerializeEdges(const std::vector<ScoredEdge>& edges);
absl::StatusOr<std::vector<ScoredEdge>> ParseEdges(std::string_view jsonl);

// Union-find over edges scoring >= threshold, taken in descending score
// (ties by ascending pair_id). Fails if threshold is outside [0, 1] or an
// edge names a mention outside `universe`.
absl::StatusOr<ClusterSet> GreedyMerge(const std::vector<ScoredEdge>& edges,
                                       double threshold,
                                       const std::set<std::string>& universe);

struct TopicEdges {
  std::string topic;
  std::set<std::string> universe;
  std::vector<ScoredEdge> edges;
};

// GreedyMerge per topic, then the disjoint union. An edge leaving its topic
// is rejected.
absl::StatusOr<ClusterSet> ClusterWithinTopics(
    const std::vector<TopicEdges>& topics, double threshold, int threads = 1);

// Buckets edges by the corpus topic of their endpoints; every corpus topic
// gets an entry so mentions without edges stay as singletons.
absl::StatusOr<std::vector<TopicEdges>> GroupEdgesByTopic(
    const Corpus& corpus, const std::vector<ScoredEdge>& edges);

}  // namespace ecr

#endif  // ECR_CLUSTER_H_
