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

#include "ecr/cluster_set.h"

#include <algorithm>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"

namespace ecr {

absl::StatusOr<ClusterSet> ClusterSet::Create(
    std::vector<std::vector<std::string>> clusters,
    std::set<std::string> universe) {
  ClusterSet out;
  std::set<std::string> seen;
  std::vector<std::string> outside;
  std::vector<std::string> duplicated;
  for (auto& cluster : clusters) {
    if (cluster.empty()) continue;
    std::sort(cluster.begin(), cluster.end());
    for (const std::string& m : cluster) {
      if (!universe.contains(m)) outside.push_back(m);
      if (!seen.insert(m).second) duplicated.push_back(m);
    }
    out.clusters_.push_back(std::move(cluster));
  }
  if (!outside.empty()) {
    return absl::FailedPreconditionError(
        absl::StrCat("mentions outside the universe: ",
                     absl::StrJoin(outside, ", ")));
  }
  if (!duplicated.empty()) {
    return absl::FailedPreconditionError(absl::StrCat(
        "mentions in more than one cluster: ", absl::StrJoin(duplicated, ", ")));
  }
  for (const std::string& m : universe) {
    if (!seen.contains(m)) out.clusters_.push_back({m});
  }
  std::sort(out.clusters_.begin(), out.clusters_.end());
  for (size_t i = 0; i < out.clusters_.size(); ++i) {
    for (const std::string& m : out.clusters_[i]) out.index_.emplace(m, i);
  }
  out.universe_ = std::move(universe);
  return out;
}

absl::StatusOr<ClusterSet> ClusterSet::FromClusters(
    std::vector<std::vector<std::string>> clusters) {
  std::set<std::string> universe;
  for (const auto& cluster : clusters) {
    universe.insert(cluster.begin(), cluster.end());
  }
  return Create(std::move(clusters), std::move(universe));
}

std::optional<size_t> ClusterSet::ClusterOf(std::string_view mention_id) const {
  auto it = index_.find(mention_id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

absl::StatusOr<ClusterSet> ClusterSet::Union(const ClusterSet& other) const {
  std::vector<std::vector<std::string>> clusters = clusters_;
  clusters.insert(clusters.end(), other.clusters_.begin(),
                  other.clusters_.end());
  std::set<std::string> universe = universe_;
  for (const std::string& m : other.universe_) {
    if (!universe.insert(m).second) {
      return absl::FailedPreconditionError(
          absl::StrCat("mention ", m, " appears in both partitions"));
    }
  }
  return Create(std::move(clusters), std::move(universe));
}

nlohmann::json ClusterSet::ToJson() const {
  nlohmann::json clusters = nlohmann::json::array();
  for (const auto& cluster : clusters_) clusters.push_back(cluster);
  return nlohmann::json{{"clusters", std::move(clusters)}};
}

absl::StatusOr<ClusterSet> ClusterSet::FromJson(const nlohmann::json& json) {
  if (!json.is_object() || !json.contains("clusters") ||
      !json["clusters"].is_array()) {
    return absl::InvalidArgumentError(
        "cluster file must be an object with a \"clusters\" array");
  }
  std::vector<std::vector<std::string>> clusters;
  for (const auto& cluster : json["clusters"]) {
    if (!cluster.is_array()) {
      return absl::InvalidArgumentError("each cluster must be an array");
    }
    std::vector<std::string> members;
    for (const auto& m : cluster) {
      if (!m.is_string()) {
        return absl::InvalidArgumentError("mention ids must be strings");
      }
      members.push_back(m.get<std::string>());
    }
    clusters.push_back(std::move(members));
  }
  return FromClusters(std::move(clusters));
}

}  // namespace ecr
