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

#ifndef ECR_CLUSTER_SET_H_
#define ECR_CLUSTER_SET_H_

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "json.hpp"

namespace ecr {

// A partition of a set of mention ids. Both gold ("key") and system
// ("response") clusterings use this type.
//
// The representation is canonical: every cluster is sorted, clusters are
// ordered by their smallest member, and every mention of the universe
// belongs to exactly one cluster (singletons included). Two ClusterSets over
// the same partition therefore compare equal and serialize identically.
class ClusterSet {
 public:
  ClusterSet() = default;

  // Builds a partition of `universe`. Mentions of the universe that appear in
  // no cluster become singletons. Fails if clusters overlap or mention ids
  // outside the universe.
  static absl::StatusOr<ClusterSet> Create(
      std::vector<std::vector<std::string>> clusters,
      std::set<std::string> universe);

  // Universe = union of the clusters.
  static absl::StatusOr<ClusterSet> FromClusters(
      std::vector<std::vector<std::string>> clusters);

  const std::vector<std::vector<std::string>>& clusters() const {
    return clusters_;
  }
  const std::set<std::string>& universe() const { return universe_; }
  size_t size() const { return clusters_.size(); }
  bool empty() const { return clusters_.empty(); }

  // Index into clusters() of the cluster holding `mention_id`.
  std::optional<size_t> ClusterOf(std::string_view mention_id) const;

  // Disjoint union; fails if the universes intersect.
  absl::StatusOr<ClusterSet> Union(const ClusterSet& other) const;

  // {"clusters":[[mention_id,...],...]}
  nlohmann::json ToJson() const;
  static absl::StatusOr<ClusterSet> FromJson(const nlohmann::json& json);

  friend bool operator==(const ClusterSet& a, const ClusterSet& b) {
    return a.clusters_ == b.clusters_;
  }

 private:
  std::vector<std::vector<std::string>> clusters_;
  std::set<std::string> universe_;
  std::map<std::string, size_t, std::less<>> index_;
};

}  // namespace ecr

#endif  // ECR_CLUSTER_SET_H_
