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

#include "ecr/metrics/assignment.h"

#include <algorithm>
#include <limits>

namespace ecr::metrics {

Assignment MaxWeightAssignment(const std::vector<std::vector<double>>& weight) {
  Assignment out;
  const size_t rows = weight.size();
  const size_t cols = rows == 0 ? 0 : weight[0].size();
  out.row_to_col.assign(rows, -1);
  if (rows == 0 || cols == 0) return out;

  const size_t n = std::max(rows, cols);
  double top = 0.0;
  for (const auto& r : weight) {
    for (double w : r) top = std::max(top, w);
  }
  // Minimisation form on a padded square matrix, 1-based as in the classic
  // potentials formulation.
  auto cost = [&](size_t i, size_t j) {
    const double w = (i <= rows && j <= cols) ? weight[i - 1][j - 1] : 0.0;
    return top - w;
  };
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<size_t> p(n + 1, 0), way(n + 1, 0);
  for (size_t i = 1; i <= n; ++i) {
    p[0] = i;
    size_t j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const size_t i0 = p[j0];
      double delta = kInf;
      size_t j1 = 0;
      for (size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  for (size_t j = 1; j <= n; ++j) {
    const size_t i = p[j];
    if (i >= 1 && i <= rows && j <= cols) {
      out.row_to_col[i - 1] = static_cast<int>(j - 1);
      out.total += weight[i - 1][j - 1];
    }
  }
  return out;
}

}  // namespace ecr::metrics
