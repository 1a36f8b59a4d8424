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

#ifndef ECR_HASHING_H_
#define ECR_HASHING_H_

#include <string>
#include <string_view>

#include "absl/status/statusor.h"

namespace ecr {

// Lowercase hex SHA-256 digest of the given bytes.
std::string Sha256Hex(std::string_view bytes);

// Digest of a file's contents.
absl::StatusOr<std::string> Sha256File(const std::string& path);

// Reads a whole file into memory.
absl::StatusOr<std::string> ReadFile(const std::string& path);

// Writes via a temporary sibling and rename(2), so readers never observe a
// partially written file.
absl::Status WriteFileAtomic(const std::string& path, std::string_view bytes);

}  // namespace ecr

#endif  // ECR_HASHING_H_
