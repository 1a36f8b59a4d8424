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

#ifndef ECR_METRICS_PAIRWISE_H_
#define ECR_METRICS_PAIRWISE_H_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "json.hpp"

namespace ecr::metrics {

struct CotAnswer {
  std::optional<bool> coreferential;  // absent when the response is incomplete
  std::optional<double> score;        // only set for a number in [0, 1]
};

// Reads the "Coreferential result(s):" line of a chain-of-thought response.
// Markdown emphasis is ignored. Any other answer shape leaves the label unset.
CotAnswer ParsePairwiseCot(std::string_view raw);

struct PairwisePrediction {
  std::string pair_id;
  std::optional<bool> coreferential;
};

struct PairwiseReport {
  // Over complete items only.
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
  double positive_rate = 0.0;
  // Over all items; incomplete ones count as wrong.
  double accuracy = 0.0;
  double tcomp = 0.0;  // n_complete / n_total
  size_t n_total = 0;
  size_t n_complete = 0;
  size_t tp = 0, fp = 0, tn = 0, fn = 0;

  static PairwiseReport FromCounts(size_t tp, size_t fp, size_t tn, size_t fn,
                                   size_t n_incomplete);
  nlohmann::json ToJson() const;
};

// Every prediction must have a gold label and vice versa.
absl::StatusOr<PairwiseReport> ComputePairwiseReport(
    const std::map<std::string, bool, std::less<>>& gold,
    const std::vector<PairwisePrediction>& predictions);

}  // namespace ecr::metrics

#endif  // ECR_METRICS_PAIRWISE_H_
