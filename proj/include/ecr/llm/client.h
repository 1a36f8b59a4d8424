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

#ifndef ECR_LLM_CLIENT_H_
#define ECR_LLM_CLIENT_H_

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "ecr/llm/prompt.h"
#include "json.hpp"

namespace ecr::llm {

inline constexpr int kDefaultMaxAttempts = 5;
inline constexpr int kDefaultMaxInFlight = 4;

struct CompletionRequest {
  std::string model = "gpt-3.5-turbo";
  std::string prompt;
  double temperature = 0.0;
  int max_tokens = 1024;
  // Not part of the cache key. Lets canned backends answer by template and
  // fill {slot} references in their responses.
  std::string template_name;
  SlotMap slots;
};

// sha256 over (model, prompt, temperature).
std::string CacheKey(const CompletionRequest& request);

struct LlmExchange {
  std::string template_name;
  std::string model;
  std::string prompt;
  std::string response;
  std::string cache_key;
  std::string timestamp;  // UTC, ISO 8601

  nlohmann::json ToJson() const;
  static absl::StatusOr<LlmExchange> FromJson(const nlohmann::json& json);
};

// A provider refusal. The status message carries the raw text.
absl::Status RefusalError(std::string_view raw);
bool IsRefusal(const absl::Status& status);

// Transport failures worth retrying: Unavailable, ResourceExhausted (429),
// DeadlineExceeded.
bool IsTransient(const absl::Status& status);

// One attempt against a provider; no caching, no retries.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual absl::StatusOr<std::string> Send(const CompletionRequest& request) = 0;
};

// Canned responses from a fixtures file:
//   {"responses": [{"prompt_sha256": "...", "response": "..."},
//                  {"template": "syn_nce", "contains": "died", "response": "..."},
//                  {"template": "para", "response": "..."}]}
// Matching order: prompt hash, then template plus substring of the prompt,
// then a template-only default. Responses may reference request slots as
// {name}. An unmatched request is NotFound.
class MockBackend : public ChatBackend {
 public:
  struct Entry {
    std::string prompt_sha256;
    std::string template_name;
    std::string contains;
    std::string response;
  };

  explicit MockBackend(std::vector<Entry> entries);
  static absl::StatusOr<std::unique_ptr<MockBackend>> FromJson(
      const nlohmann::json& fixtures);
  static absl::StatusOr<std::unique_ptr<MockBackend>> FromFile(
      const std::string& path);

  absl::StatusOr<std::string> Send(const CompletionRequest& request) override;

  int64_t calls() const { return calls_.load(); }

 private:
  std::vector<Entry> entries_;
  std::atomic<int64_t> calls_{0};
};

// Scripted statuses for tests: returns each entry in turn, then repeats the
// last.
class ScriptedBackend : public ChatBackend {
 public:
  explicit ScriptedBackend(std::vector<absl::StatusOr<std::string>> script);
  absl::StatusOr<std::string> Send(const CompletionRequest& request) override;
  int64_t calls() const { return calls_.load(); }

 private:
  std::mutex mu_;
  std::vector<absl::StatusOr<std::string>> script_;
  std::atomic<int64_t> calls_{0};
};

// OpenAI-compatible chat completions endpoint.
struct HttpBackendOptions {
  std::string base_url = "https://api.openai.com";
  std::string path = "/v1/chat/completions";
  std::string api_key_env = "OPENAI_API_KEY";
  std::chrono::seconds timeout{120};
};

class OpenAiBackend : public ChatBackend {
 public:
  // Fails when the key variable is unset.
  static absl::StatusOr<std::unique_ptr<OpenAiBackend>> Create(
      HttpBackendOptions options);
  absl::StatusOr<std::string> Send(const CompletionRequest& request) override;

 private:
  OpenAiBackend(HttpBackendOptions options, std::string api_key)
      : options_(std::move(options)), api_key_(std::move(api_key)) {}
  HttpBackendOptions options_;
  std::string api_key_;
};

struct ClientOptions {
  // Empty: in-memory cache only.
  std::string cache_dir;
  int max_attempts = kDefaultMaxAttempts;
  std::chrono::milliseconds base_backoff{500};
  int max_in_flight = kDefaultMaxInFlight;
  // 0 disables the limiter.
  double max_requests_per_second = 0.0;
  // Replaced in tests to avoid real waits.
  std::function<void(std::chrono::milliseconds)> sleep;
};

// Caching, retrying, concurrency-bounded front end to a backend.
// Thread-safe.
class LlmClient {
 public:
  LlmClient(std::unique_ptr<ChatBackend> backend, ClientOptions options);

  absl::StatusOr<std::string> Complete(const CompletionRequest& request);

  // Renders `tmpl` with `slots` and completes it.
  absl::StatusOr<std::string> CompleteTemplate(const PromptTemplate& tmpl,
                                               const SlotMap& slots,
                                               std::string_view model,
                                               double temperature = 0.0);

  int64_t backend_calls() const { return backend_calls_.load(); }
  int64_t cache_hits() const { return cache_hits_.load(); }
  ChatBackend& backend() { return *backend_; }

 private:
  std::optional<std::string> Lookup(const std::string& key);
  absl::Status Store(const LlmExchange& exchange);
  absl::StatusOr<std::string> SendWithRetries(const CompletionRequest& request);
  void AcquireSlot();
  void ReleaseSlot();
  void Throttle();

  std::unique_ptr<ChatBackend> backend_;
  ClientOptions options_;

  std::mutex cache_mu_;
  std::map<std::string, std::string> memory_cache_;

  std::mutex slot_mu_;
  std::condition_variable slot_cv_;
  int in_flight_ = 0;

  std::mutex rate_mu_;
  std::chrono::steady_clock::time_point next_send_{};

  std::atomic<int64_t> backend_calls_{0};
  std::atomic<int64_t> cache_hits_{0};
};

}  // namespace ecr::llm

#endif  // ECR_LLM_CLIENT_H_
