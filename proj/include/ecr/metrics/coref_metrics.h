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

#ifndef ECR_METRICS_COREF_METRICS_H_
#define ECR_METRICS_COREF_METRICS_H_

#include <string>

#include "absl/status/statusor.h"
#include "ecr/cluster_set.h"
#include "json.hpp"

namespace ecr::metrics {

struct Prf {
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
};

// Ratios with a zero denominator are 0, as in the reference CoNLL scorer.
// Identical empty clusterings therefore score 0, not 1.
Prf MakePrf(double recall_num, double recall_den, double precision_num,
            double precision_den);

// How LEA treats single-mention entities.
enum class LeaSingletons {
  // One self-link, resolved iff the mention is a singleton on the other side.
  kSelfLink,
  // Singleton entities are ignored on the evaluated side.
  kExclude,
};

// All metrics require key and response over the same mention universe
// (FailedPrecondition otherwise).
absl::StatusOr<Prf> Muc(const ClusterSet& key, const ClusterSet& response);
absl::StatusOr<Prf> BCubed(const ClusterSet& key, const ClusterSet& response);
absl::StatusOr<Prf> CeafE(const ClusterSet& key, const ClusterSet& response);
absl::StatusOr<Prf> Lea(const ClusterSet& key, const ClusterSet& response,
                        LeaSingletons singletons = LeaSingletons::kSelfLink);

struct MetricReport {
  Prf muc;
  Prf b_cubed;
  Prf ceaf_e;
  Prf lea;
  double conll_f1 = 0.0;  // mean of MUC, B3 and CEAF_e F1

  nlohmann::json ToJson() const;
  // Two header rows and one row of percentages, one decimal each.
  std::string ToTable() const;
};

absl::StatusOr<MetricReport> Conll(
    const ClusterSet& key, const ClusterSet& response,
    LeaSingletons singletons = LeaSingletons::kSelfLink);

}  // namespace ecr::metrics

#endif  // ECR_METRICS_COREF_METRICS_H_
