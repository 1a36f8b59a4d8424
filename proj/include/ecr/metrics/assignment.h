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

#ifndef ECR_METRICS_ASSIGNMENT_H_
#define ECR_METRICS_ASSIGNMENT_H_

#include <vector>

namespace ecr::metrics {

struct Assignment {
  // row_to_col[i] is the column matched to row i, or -1 when row i is
  // left over in a rectangular problem.
  std::vector<int> row_to_col;
  double total = 0.0;
};

// Maximum-weight one-to-one assignment (Hungarian method, O(n^3)).
// Rectangular inputs are padded with zero-weight dummies. Rows must be of
// equal length.
Assignment MaxWeightAssignment(const std::vector<std::vector<double>>& weight);

}  // namespace ecr::metrics

#endif  // ECR_METRICS_ASSIGNMENT_H_
