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

#include "ecr/cluster.h"

#include <algorithm>
#include <atomic>
#include <map>
#include <numeric>
#include <optional>
#include <thread>

#include "absl/strings/str_cat.h"
#include "ecr/strings.h"

namespace ecr {
namespace {

using nlohmann::json;

class DisjointSets {
 public:
  explicit DisjointSets(size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), size_t{0});
  }
  size_t Find(size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void Union(size_t a, size_t b) {
    a = Find(a);
    b = Find(b);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
  }

 private:
  std::vector<size_t> parent_;
  std::vector<size_t> size_;
};

}  // namespace

json ScoredEdge::ToJson() const {
  return json{{"pair_id", pair_id},
              {"first", first},
              {"second", second},
              {"score", score}};
}

absl::StatusOr<ScoredEdge> ScoredEdge::FromJson(const json& j) {
  if (!j.is_object() || !j.contains("pair_id") || !j["pair_id"].is_string() ||
      !j.contains("first") || !j["first"].is_string() ||
      !j.contains("second") || !j["second"].is_string() ||
      !j.contains("score") || !j["score"].is_number()) {
    return absl::InvalidArgumentError(
        "edge needs string pair_id, first, second and numeric score");
  }
  return ScoredEdge{j["pair_id"].get<std::string>(),
                    j["first"].get<std::string>(),
                    j["second"].get<std::string>(), j["score"].get<double>()};
}

std::string SerializeEdges(const std::vector<ScoredEdge>& edges) {
  std::string out;
  for (const ScoredEdge& e : edges) absl::StrAppend(&out, e.ToJson().dump(), "\n");
  return out;
}

absl::StatusOr<std::vector<ScoredEdge>> ParseEdges(std::string_view jsonl) {
  std::vector<ScoredEdge> out;
  size_t line_no = 0;
  for (std::string_view line : SplitSv(jsonl, '\n')) {
    ++line_no;
    if (StripWhitespace(line).empty()) continue;
    json j = json::parse(line, nullptr, false);
    auto e = ScoredEdge::FromJson(j);
    if (!e.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": ", e.status().message()));
    }
    out.push_back(*std::move(e));
  }
  return out;
}

absl::StatusOr<ClusterSet> GreedyMerge(const std::vector<ScoredEdge>& edges,
                                       double threshold,
                                       const std::set<std::string>& universe) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("threshold ", threshold, " outside [0, 1]"));
  }
  std::map<std::string_view, size_t> id;
  std::vector<std::string_view> names;
  for (const std::string& m : universe) {
    id.emplace(m, names.size());
    names.push_back(m);
  }
  std::vector<const ScoredEdge*> kept;
  for (const ScoredEdge& e : edges) {
    for (const std::string* end : {&e.first, &e.second}) {
      if (id.find(*end) == id.end()) {
        return absl::FailedPreconditionError(
            absl::StrCat("edge ", e.pair_id, " names mention ", *end,
                         " outside the universe"));
      }
    }
    if (e.score >= threshold) kept.push_back(&e);
  }
  std::sort(kept.begin(), kept.end(),
            [](const ScoredEdge* a, const ScoredEdge* b) {
              if (a->score != b->score) return a->score > b->score;
              return a->pair_id < b->pair_id;
            });
  DisjointSets sets(names.size());
  for (const ScoredEdge* e : kept) sets.Union(id[e->first], id[e->second]);

  std::map<size_t, std::vector<std::string>> groups;
  for (size_t i = 0; i < names.size(); ++i) {
    groups[sets.Find(i)].emplace_back(names[i]);
  }
  std::vector<std::vector<std::string>> clusters;
  clusters.reserve(groups.size());
  for (auto& [root, members] : groups) clusters.push_back(std::move(members));
  return ClusterSet::Create(std::move(clusters), universe);
}

absl::StatusOr<ClusterSet> ClusterWithinTopics(
    const std::vector<TopicEdges>& topics, double threshold, int threads) {
  for (const TopicEdges& t : topics) {
    for (const ScoredEdge& e : t.edges) {
      if (!t.universe.count(e.first) || !t.universe.count(e.second)) {
        return absl::FailedPreconditionError(
            absl::StrCat("edge ", e.pair_id, " leaves topic ", t.topic));
      }
    }
  }
  std::vector<std::optional<absl::StatusOr<ClusterSet>>> parts(topics.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next.fetch_add(1); i < topics.size();
         i = next.fetch_add(1)) {
      parts[i] = GreedyMerge(topics[i].edges, threshold, topics[i].universe);
    }
  };
  const int n = std::max(
      1, std::min<int>(threads, static_cast<int>(topics.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  ClusterSet all;
  for (auto& p : parts) {
    if (!p->ok()) return p->status();
    auto merged = all.Union(**p);
    if (!merged.ok()) return merged.status();
    all = *std::move(merged);
  }
  return all;
}

absl::StatusOr<std::vector<TopicEdges>> GroupEdgesByTopic(
    const Corpus& corpus, const std::vector<ScoredEdge>& edges) {
  std::map<std::string, TopicEdges> by_topic;
  for (const std::string& topic : corpus.Topics()) {
    TopicEdges& t = by_topic[topic];
    t.topic = topic;
    for (std::string& m : corpus.MentionIdsInTopic(topic)) {
      t.universe.insert(std::move(m));
    }
  }
  for (const ScoredEdge& e : edges) {
    const Mention* a = corpus.FindMention(e.first);
    const Mention* b = corpus.FindMention(e.second);
    if (a == nullptr || b == nullptr) {
      return absl::FailedPreconditionError(absl::StrCat(
          "edge ", e.pair_id, " names a mention missing from the corpus"));
    }
    const std::string& ta = corpus.TopicOf(*a);
    if (ta != corpus.TopicOf(*b)) {
      return absl::FailedPreconditionError(
          absl::StrCat("edge ", e.pair_id, " crosses topics ", ta, " and ",
                       corpus.TopicOf(*b)));
    }
    by_topic[ta].edges.push_back(e);
  }
  std::vector<TopicEdges> out;
  out.reserve(by_topic.size());
  for (auto& [topic, t] : by_topic) out.push_back(std::move(t));
  return out;
}

}  // namespace ecr
