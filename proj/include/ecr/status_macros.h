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

#ifndef ECR_STATUS_MACROS_H_
#define ECR_STATUS_MACROS_H_

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define ECR_STATUS_CONCAT_INNER_(a, b) a##b
#define ECR_STATUS_CONCAT_(a, b) ECR_STATUS_CONCAT_INNER_(a, b)

#define ECR_RETURN_IF_ERROR(expr)                  \
  do {                                             \
    if (absl::Status _ecr_status = (expr);         \
        !_ecr_status.ok()) {                       \
      return _ecr_status;                          \
    }                                              \
  } while (0)

#define ECR_ASSIGN_OR_RETURN_IMPL_(tmp, lhs, rexpr) \
  auto tmp = (rexpr);                               \
  if (!tmp.ok()) return tmp.status();               \
  lhs = std::move(*tmp)

// Evaluates a StatusOr expression, returning its status on failure and
// assigning the value to lhs otherwise.
#define ECR_ASSIGN_OR_RETURN(lhs, rexpr) \
  ECR_ASSIGN_OR_RETURN_IMPL_(            \
      ECR_STATUS_CONCAT_(_ecr_statusor_, __LINE__), lhs, rexpr)

#endif  // ECR_STATUS_MACROS_H_
