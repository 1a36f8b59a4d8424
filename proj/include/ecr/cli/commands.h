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

#ifndef ECR_CLI_COMMANDS_H_
#define ECR_CLI_COMMANDS_H_

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace ecr::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitConfigError = 2;

inline constexpr std::string_view kToolVersion = "0.1.0";

// Runs one subcommand. `args` excludes the program name. Reports go to
// `out`, diagnostics to `err`. Returns the process exit code.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace ecr::cli

#endif  // ECR_CLI_COMMANDS_H_
