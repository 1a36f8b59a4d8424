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

#include "ecr/strings.h"

#include "absl/strings/ascii.h"
#include "absl/strings/str_split.h"

namespace ecr {

std::vector<std::string_view> SplitSv(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  for (absl::string_view piece : absl::StrSplit(AbslSv(text), sep)) {
    out.push_back(StdSv(piece));
  }
  return out;
}

std::string_view StripWhitespace(std::string_view text) {
  return StdSv(absl::StripAsciiWhitespace(AbslSv(text)));
}

std::string ToLowerAscii(std::string_view text) {
  return absl::AsciiStrToLower(AbslSv(text));
}

}  // namespace ecr
