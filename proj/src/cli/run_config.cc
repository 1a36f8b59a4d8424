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

#include "ecr/cli/run_config.h"

#include <set>

#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"
#include "ecr/augment.h"
#include "ecr/hashing.h"
#include "ecr/status_macros.h"
#include "ecr/strings.h"

namespace ecr::cli {
namespace {

using nlohmann::json;

template <typename T>
absl::Status Read(const json& obj, const char* key, T& field) {
  auto it = obj.find(key);
  if (it == obj.end()) return absl::OkStatus();
  try {
    field = it->get<T>();
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("config key \"", key, "\": ", e.what()));
  }
  return absl::OkStatus();
}

absl::Status RejectUnknown(const json& obj, const std::set<std::string>& known,
                           std::string_view where) {
  for (const auto& [key, value] : obj.items()) {
    if (!known.count(key)) {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown config key \"", AbslSv(where), key, "\""));
    }
  }
  return absl::OkStatus();
}

absl::Status Positive(const char* name, int value) {
  if (value >= 1) return absl::OkStatus();
  return absl::InvalidArgumentError(
      absl::StrCat(name, " must be >= 1, got ", value));
}

}  // namespace

json RunConfig::ToJson() const {
  json out = json::object();
  out["corpus"] = corpus;
  out["split"] = split;
  out["dataset"] = dataset;
  out["out_dir"] = out_dir;
  out["w"] = w;
  out["k_train"] = k_train;
  out["k_infer"] = k_infer;
  out["retrieval_scope"] = retrieval_scope;
  out["similarity_threshold"] = similarity_threshold;
  out["normalizer"] = normalizer;
  out["augment_kinds"] = augment_kinds;
  out["per_original"] = per_original;
  out["top_n"] = top_n;
  out["llm"] = json{{"provider", llm.provider},
                    {"model", llm.model},
                    {"temperature", llm.temperature},
                    {"fixtures", llm.fixtures},
                    {"base_url", llm.base_url},
                    {"max_in_flight", llm.max_in_flight},
                    {"max_attempts", llm.max_attempts},
                    {"max_requests_per_second", llm.max_requests_per_second}};
  out["scorer"] = scorer;
  out["scorer_batch_size"] = scorer_batch_size;
  out["scorer_in_flight"] = scorer_in_flight;
  out["threshold"] = threshold;
  out["lea_singletons"] = lea_singletons;
  out["seed"] = seed;
  out["cache_dir"] = cache_dir;
  out["threads"] = threads;
  return out;
}

absl::StatusOr<RunConfig> RunConfig::FromJson(const json& j) {
  if (!j.is_object()) {
    return absl::InvalidArgumentError("config must be a JSON object");
  }
  RunConfig c;
  const json defaults = c.ToJson();
  std::set<std::string> known;
  for (const auto& [key, value] : defaults.items()) known.insert(key);
  ECR_RETURN_IF_ERROR(RejectUnknown(j, known, ""));

  ECR_RETURN_IF_ERROR(Read(j, "corpus", c.corpus));
  ECR_RETURN_IF_ERROR(Read(j, "split", c.split));
  ECR_RETURN_IF_ERROR(Read(j, "dataset", c.dataset));
  ECR_RETURN_IF_ERROR(Read(j, "out_dir", c.out_dir));
  ECR_RETURN_IF_ERROR(Read(j, "w", c.w));
  ECR_RETURN_IF_ERROR(Read(j, "k_train", c.k_train));
  ECR_RETURN_IF_ERROR(Read(j, "k_infer", c.k_infer));
  ECR_RETURN_IF_ERROR(Read(j, "retrieval_scope", c.retrieval_scope));
  ECR_RETURN_IF_ERROR(Read(j, "similarity_threshold", c.similarity_threshold));
  ECR_RETURN_IF_ERROR(Read(j, "normalizer", c.normalizer));
  ECR_RETURN_IF_ERROR(Read(j, "augment_kinds", c.augment_kinds));
  ECR_RETURN_IF_ERROR(Read(j, "per_original", c.per_original));
  ECR_RETURN_IF_ERROR(Read(j, "top_n", c.top_n));
  ECR_RETURN_IF_ERROR(Read(j, "scorer", c.scorer));
  ECR_RETURN_IF_ERROR(Read(j, "scorer_batch_size", c.scorer_batch_size));
  ECR_RETURN_IF_ERROR(Read(j, "scorer_in_flight", c.scorer_in_flight));
  ECR_RETURN_IF_ERROR(Read(j, "threshold", c.threshold));
  ECR_RETURN_IF_ERROR(Read(j, "lea_singletons", c.lea_singletons));
  ECR_RETURN_IF_ERROR(Read(j, "seed", c.seed));
  ECR_RETURN_IF_ERROR(Read(j, "cache_dir", c.cache_dir));
  ECR_RETURN_IF_ERROR(Read(j, "threads", c.threads));
  if (auto it = j.find("llm"); it != j.end()) {
    if (!it->is_object()) {
      return absl::InvalidArgumentError("config key \"llm\" must be an object");
    }
    std::set<std::string> llm_known;
    for (const auto& [key, value] : defaults["llm"].items()) {
      llm_known.insert(key);
    }
    ECR_RETURN_IF_ERROR(RejectUnknown(*it, llm_known, "llm."));
    ECR_RETURN_IF_ERROR(Read(*it, "provider", c.llm.provider));
    ECR_RETURN_IF_ERROR(Read(*it, "model", c.llm.model));
    ECR_RETURN_IF_ERROR(Read(*it, "temperature", c.llm.temperature));
    ECR_RETURN_IF_ERROR(Read(*it, "fixtures", c.llm.fixtures));
    ECR_RETURN_IF_ERROR(Read(*it, "base_url", c.llm.base_url));
    ECR_RETURN_IF_ERROR(Read(*it, "max_in_flight", c.llm.max_in_flight));
    ECR_RETURN_IF_ERROR(Read(*it, "max_attempts", c.llm.max_attempts));
    ECR_RETURN_IF_ERROR(Read(*it, "max_requests_per_second",
                             c.llm.max_requests_per_second));
  }
  return c;
}

std::string RunConfig::Hash() const { return Sha256Hex(ToJson().dump()); }

absl::Status RunConfig::Validate() const {
  if (split != "train" && split != "dev" && split != "test") {
    return absl::InvalidArgumentError(
        absl::StrCat("split must be train, dev or test, got \"", split, "\""));
  }
  if (w < 0) return absl::InvalidArgumentError("w must be >= 0");
  ECR_RETURN_IF_ERROR(Positive("k_train", k_train));
  ECR_RETURN_IF_ERROR(Positive("k_infer", k_infer));
  ECR_RETURN_IF_ERROR(Positive("per_original", per_original));
  ECR_RETURN_IF_ERROR(Positive("top_n", top_n));
  ECR_RETURN_IF_ERROR(Positive("scorer_batch_size", scorer_batch_size));
  ECR_RETURN_IF_ERROR(Positive("scorer_in_flight", scorer_in_flight));
  ECR_RETURN_IF_ERROR(Positive("threads", threads));
  ECR_RETURN_IF_ERROR(Positive("llm.max_in_flight", llm.max_in_flight));
  ECR_RETURN_IF_ERROR(Positive("llm.max_attempts", llm.max_attempts));
  if (retrieval_scope != "topic" && retrieval_scope != "corpus") {
    return absl::InvalidArgumentError(
        "retrieval_scope must be \"topic\" or \"corpus\"");
  }
  if (normalizer != "lemma" && normalizer != "surface") {
    return absl::InvalidArgumentError(
        "normalizer must be \"lemma\" or \"surface\"");
  }
  if (similarity_threshold < 0 || similarity_threshold > 100) {
    return absl::InvalidArgumentError(
        "similarity_threshold must be in [0, 100]");
  }
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    return absl::InvalidArgumentError("threshold must be in [0, 1]");
  }
  if (lea_singletons != "self-link" && lea_singletons != "exclude") {
    return absl::InvalidArgumentError(
        "lea_singletons must be \"self-link\" or \"exclude\"");
  }
  if (scorer != "lemma" && !absl::StartsWith(scorer, "http://") &&
      !absl::StartsWith(scorer, "https://")) {
    return absl::InvalidArgumentError(
        absl::StrCat("scorer must be \"lemma\" or an http(s) URL, got \"",
                     scorer, "\""));
  }
  for (const std::string& kind : augment_kinds) {
    if (!ParseAugmentKind(kind).ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown augmentation kind \"", kind, "\""));
    }
  }
  if (llm.provider != "mock" && llm.provider != "openai") {
    return absl::InvalidArgumentError(
        "llm.provider must be \"mock\" or \"openai\"");
  }
  if (!(llm.temperature >= 0.0 && llm.temperature <= 2.0)) {
    return absl::InvalidArgumentError("llm.temperature must be in [0, 2]");
  }
  if (llm.max_requests_per_second < 0.0) {
    return absl::InvalidArgumentError(
        "llm.max_requests_per_second must be >= 0");
  }
  return absl::OkStatus();
}

absl::StatusOr<RunConfig> LoadRunConfig(const std::string& path) {
  ECR_ASSIGN_OR_RETURN(std::string text, ReadFile(path));
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) {
    return absl::InvalidArgumentError(
        absl::StrCat("config ", path, " is not valid JSON"));
  }
  return RunConfig::FromJson(j);
}

}  // namespace ecr::cli
