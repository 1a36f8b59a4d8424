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

#ifndef ECR_TESTS_PIPELINE_ORACLE_H_
#define ECR_TESTS_PIPELINE_ORACLE_H_

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "absl/strings/ascii.h"
#include "ecr/corpus.h"
#include "ecr/pairing.h"
#include "oracles.h"

namespace ecr::testing {

struct PipelineExpectation {
  oracle::Partition gold;
  oracle::Partition response;
  oracle::Scores muc, b_cubed, ceaf_e, lea;
  double conll = 0;
};

// What the lemma-scorer pipeline must produce on an inference split:
// brute-force top-k neighbors inside each topic, an edge wherever the two
// head lemmas agree, connected components, then the oracle metrics.
inline PipelineExpectation DerivePipelineExpectation(const Corpus& corpus,
                                                     int k, int w) {
  TokenOverlapSimilarity sim(corpus, w);
  auto lemma = [](const Mention& m) {
    return absl::AsciiStrToLower(m.head_lemma.empty() ? m.trigger_text
                                                      : m.head_lemma);
  };
  std::set<std::string> nodes;
  std::vector<std::pair<std::string, std::string>> links;
  std::map<std::string, std::vector<std::string>> gold;
  for (const auto& [id, a] : corpus.mentions()) {
    nodes.insert(id);
    gold[a.gold_cluster_id].push_back(id);
    std::vector<std::pair<double, std::string>> cands;
    for (const auto& [other, b] : corpus.mentions()) {
      if (other == id || corpus.TopicOf(a) != corpus.TopicOf(b)) continue;
      cands.emplace_back(-sim.Score(a, b), other);
    }
    std::sort(cands.begin(), cands.end());
    for (int r = 0; r < k && r < static_cast<int>(cands.size()); ++r) {
      const Mention& b = *corpus.FindMention(cands[r].second);
      if (lemma(a) == lemma(b)) links.emplace_back(id, b.mention_id);
    }
  }
  PipelineExpectation e;
  e.response = oracle::Components(nodes, links);
  for (auto& [c, ids] : gold) {
    std::sort(ids.begin(), ids.end());
    e.gold.push_back(ids);
  }
  std::sort(e.gold.begin(), e.gold.end());
  e.muc = oracle::Muc(e.gold, e.response);
  e.b_cubed = oracle::BCubed(e.gold, e.response);
  e.ceaf_e = oracle::CeafESparse(e.gold, e.response);
  e.lea = oracle::Lea(e.gold, e.response);
  e.conll = (e.muc.f + e.b_cubed.f + e.ceaf_e.f) / 3;
  return e;
}

}  // namespace ecr::testing

#endif  // ECR_TESTS_PIPELINE_ORACLE_H_
