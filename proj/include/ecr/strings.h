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

#ifndef ECR_STRINGS_H_
#define ECR_STRINGS_H_

#include <string>
#include <string_view>
#include <vector>

#include "absl/strings/string_view.h"

namespace ecr {

// The packaged absl keeps its own string_view type; these bridge the two.
inline absl::string_view AbslSv(std::string_view s) {
  return absl::string_view(s.data(), s.size());
}
inline std::string_view StdSv(absl::string_view s) {
  return std::string_view(s.data(), s.size());
}

// Splits on sep, keeping empty pieces. Pieces view into text.
std::vector<std::string_view> SplitSv(std::string_view text, char sep);

std::string_view StripWhitespace(std::string_view text);

std::string ToLowerAscii(std::string_view text);

}  // namespace ecr

#endif  // ECR_STRINGS_H_
