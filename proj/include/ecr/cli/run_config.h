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

#ifndef ECR_CLI_RUN_CONFIG_H_
#define ECR_CLI_RUN_CONFIG_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "json.hpp"

namespace ecr::cli {

struct LlmConfig {
  std::string provider = "mock";  // "mock" or "openai"
  std::string model = "gpt-3.5-turbo";
  double temperature = 0.0;
  std::string fixtures;  // mock responses file
  std::string base_url = "https://api.openai.com";
  int max_in_flight = 4;
  int max_attempts = 5;
  double max_requests_per_second = 0.0;
};

// Settings for every stage. Loaded from a JSON file, then overridden by
// flags. Unknown keys are rejected so typos do not silently fall back to
// defaults.
struct RunConfig {
  std::string corpus;
  std::string split = "test";
  std::string dataset;  // reference statistics for `validate`
  std::string out_dir;  // stages that write artifacts require it

  int w = 2;
  int k_train = 15;
  int k_infer = 5;
  std::string retrieval_scope = "topic";  // or "corpus"

  int similarity_threshold = 80;
  std::string normalizer = "lemma";  // or "surface"

  std::vector<std::string> augment_kinds;
  int per_original = 2;
  int top_n = 5;
  LlmConfig llm;

  std::string scorer = "lemma";  // or an http(s) endpoint
  int scorer_batch_size = 32;
  int scorer_in_flight = 2;
  double threshold = 0.5;
  std::string lea_singletons = "self-link";  // or "exclude"

  uint64_t seed = 0;
  std::string cache_dir;
  int threads = 1;

  // Every field, in a fixed key order.
  nlohmann::json ToJson() const;
  static absl::StatusOr<RunConfig> FromJson(const nlohmann::json& json);

  // SHA-256 of the canonical JSON dump.
  std::string Hash() const;

  // Ranges and enumerations. Path existence is checked per stage.
  absl::Status Validate() const;
};

absl::StatusOr<RunConfig> LoadRunConfig(const std::string& path);

}  // namespace ecr::cli

#endif  // ECR_CLI_RUN_CONFIG_H_
