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

#include "ecr/llm/client.h"

#include <cmath>
#include <ctime>
#include <filesystem>
#include <thread>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "ecr/hashing.h"
#include "ecr/strings.h"
#include "httplib.h"

namespace ecr::llm {
namespace {

using nlohmann::json;

constexpr std::string_view kRefusalPrefix = "provider refusal: ";

std::string UtcTimestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Replaces {name} with slots[name] where the slot exists; other text is kept.
std::string FillSlots(std::string_view text, const SlotMap& slots) {
  std::string out;
  size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '{') {
      const size_t close = text.find('}', i + 1);
      if (close != std::string_view::npos) {
        auto it = slots.find(text.substr(i + 1, close - i - 1));
        if (it != slots.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out += text[i++];
  }
  return out;
}

}  // namespace

std::string CacheKey(const CompletionRequest& request) {
  // Field separators keep ("ab","c") and ("a","bc") apart.
  return Sha256Hex(absl::StrCat(request.model, "\x1f", request.prompt, "\x1f",
                                absl::StrFormat("%.6f", request.temperature)));
}

json LlmExchange::ToJson() const {
  return json{{"template", template_name}, {"model", model},
              {"prompt", prompt},          {"response", response},
              {"cache_key", cache_key},    {"timestamp", timestamp}};
}

absl::StatusOr<LlmExchange> LlmExchange::FromJson(const json& j) {
  if (!j.is_object() || !j.contains("response") ||
      !j["response"].is_string() || !j.contains("cache_key") ||
      !j["cache_key"].is_string()) {
    return absl::DataLossError("cache entry lacks response or cache_key");
  }
  LlmExchange e;
  e.template_name = j.value("template", "");
  e.model = j.value("model", "");
  e.prompt = j.value("prompt", "");
  e.response = j["response"].get<std::string>();
  e.cache_key = j["cache_key"].get<std::string>();
  e.timestamp = j.value("timestamp", "");
  return e;
}

absl::Status RefusalError(std::string_view raw) {
  return absl::PermissionDeniedError(
      absl::StrCat(AbslSv(kRefusalPrefix), AbslSv(raw)));
}

bool IsRefusal(const absl::Status& status) {
  return status.code() == absl::StatusCode::kPermissionDenied &&
         StdSv(status.message()).substr(0, kRefusalPrefix.size()) ==
             kRefusalPrefix;
}

bool IsTransient(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kUnavailable:
    case absl::StatusCode::kResourceExhausted:
    case absl::StatusCode::kDeadlineExceeded:
      return true;
    default:
      return false;
  }
}

MockBackend::MockBackend(std::vector<Entry> entries)
    : entries_(std::move(entries)) {}

absl::StatusOr<std::unique_ptr<MockBackend>> MockBackend::FromJson(
    const json& fixtures) {
  if (!fixtures.is_object() || !fixtures.contains("responses") ||
      !fixtures["responses"].is_array()) {
    return absl::InvalidArgumentError(
        "mock fixtures need a \"responses\" array");
  }
  std::vector<Entry> entries;
  size_t i = 0;
  for (const json& r : fixtures["responses"]) {
    if (!r.is_object() || !r.contains("response") ||
        !r["response"].is_string()) {
      return absl::InvalidArgumentError(
          absl::StrCat("mock fixture ", i, " lacks a string \"response\""));
    }
    Entry e;
    e.prompt_sha256 = r.value("prompt_sha256", "");
    e.template_name = r.value("template", "");
    e.contains = r.value("contains", "");
    e.response = r["response"].get<std::string>();
    if (e.prompt_sha256.empty() && e.template_name.empty()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "mock fixture ", i, " needs \"prompt_sha256\" or \"template\""));
    }
    entries.push_back(std::move(e));
    ++i;
  }
  return std::make_unique<MockBackend>(std::move(entries));
}

absl::StatusOr<std::unique_ptr<MockBackend>> MockBackend::FromFile(
    const std::string& path) {
  auto contents = ReadFile(path);
  if (!contents.ok()) return contents.status();
  json j = json::parse(*contents, nullptr, false);
  if (j.is_discarded()) {
    return absl::InvalidArgumentError(
        absl::StrCat("mock fixtures ", path, " are not valid JSON"));
  }
  return FromJson(j);
}

absl::StatusOr<std::string> MockBackend::Send(
    const CompletionRequest& request) {
  calls_.fetch_add(1);
  const std::string hash = Sha256Hex(request.prompt);
  const Entry* by_substring = nullptr;
  const Entry* by_template = nullptr;
  for (const Entry& e : entries_) {
    if (!e.prompt_sha256.empty()) {
      if (e.prompt_sha256 == hash) return FillSlots(e.response, request.slots);
      continue;
    }
    if (e.template_name != request.template_name) continue;
    if (!e.contains.empty()) {
      if (by_substring == nullptr &&
          request.prompt.find(e.contains) != std::string::npos) {
        by_substring = &e;
      }
    } else if (by_template == nullptr) {
      by_template = &e;
    }
  }
  const Entry* hit = by_substring != nullptr ? by_substring : by_template;
  if (hit == nullptr) {
    return absl::NotFoundError(absl::StrCat(
        "no mock response for template \"", request.template_name,
        "\" (prompt sha256 ", hash, ")"));
  }
  return FillSlots(hit->response, request.slots);
}

ScriptedBackend::ScriptedBackend(
    std::vector<absl::StatusOr<std::string>> script)
    : script_(std::move(script)) {}

absl::StatusOr<std::string> ScriptedBackend::Send(const CompletionRequest&) {
  const int64_t n = calls_.fetch_add(1);
  std::lock_guard<std::mutex> lock(mu_);
  if (script_.empty()) return absl::UnavailableError("empty script");
  const size_t i = std::min<size_t>(static_cast<size_t>(n), script_.size() - 1);
  return script_[i];
}

absl::StatusOr<std::unique_ptr<OpenAiBackend>> OpenAiBackend::Create(
    HttpBackendOptions options) {
  const char* key = std::getenv(options.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    return absl::FailedPreconditionError(absl::StrCat(
        "environment variable ", options.api_key_env, " is not set"));
  }
  return std::unique_ptr<OpenAiBackend>(
      new OpenAiBackend(std::move(options), key));
}

absl::StatusOr<std::string> OpenAiBackend::Send(
    const CompletionRequest& request) {
  httplib::Client cli(options_.base_url);
  const auto secs = options_.timeout.count();
  cli.set_connection_timeout(secs, 0);
  cli.set_read_timeout(secs, 0);
  cli.set_write_timeout(secs, 0);
  const json body = {
      {"model", request.model},
      {"messages", json::array({{{"role", "user"}, {"content", request.prompt}}})},
      {"temperature", request.temperature},
      {"max_tokens", request.max_tokens}};
  httplib::Headers headers = {{"Authorization", "Bearer " + api_key_}};
  auto res = cli.Post(options_.path, headers, body.dump(), "application/json");
  if (!res) {
    return absl::UnavailableError(
        absl::StrCat("transport: ", httplib::to_string(res.error())));
  }
  if (res->status == 429) {
    return absl::ResourceExhaustedError(
        absl::StrCat("HTTP 429: ", res->body));
  }
  if (res->status >= 500) {
    return absl::UnavailableError(
        absl::StrCat("HTTP ", res->status, ": ", res->body));
  }
  if (res->status != 200) {
    return absl::InvalidArgumentError(
        absl::StrCat("HTTP ", res->status, ": ", res->body));
  }
  json j = json::parse(res->body, nullptr, false);
  if (j.is_discarded() || !j.contains("choices") || !j["choices"].is_array() ||
      j["choices"].empty()) {
    return absl::DataLossError(
        absl::StrCat("malformed completion: ", res->body));
  }
  const json& choice = j["choices"][0];
  const json& msg = choice.value("message", json::object());
  if (msg.contains("refusal") && msg["refusal"].is_string()) {
    return RefusalError(msg["refusal"].get<std::string>());
  }
  std::string content =
      msg.contains("content") && msg["content"].is_string()
          ? msg["content"].get<std::string>()
          : std::string();
  if (choice.value("finish_reason", "") == "content_filter") {
    return RefusalError(content);
  }
  return content;
}

LlmClient::LlmClient(std::unique_ptr<ChatBackend> backend,
                     ClientOptions options)
    : backend_(std::move(backend)), options_(std::move(options)) {
  if (options_.max_attempts < 1) options_.max_attempts = 1;
  if (options_.max_in_flight < 1) options_.max_in_flight = 1;
  if (!options_.sleep) {
    options_.sleep = [](std::chrono::milliseconds d) {
      std::this_thread::sleep_for(d);
    };
  }
}

std::optional<std::string> LlmClient::Lookup(const std::string& key) {
  {
    std::lock_guard<std::mutex> lock(cache_mu_);
    auto it = memory_cache_.find(key);
    if (it != memory_cache_.end()) return it->second;
  }
  if (options_.cache_dir.empty()) return std::nullopt;
  const std::string path =
      (std::filesystem::path(options_.cache_dir) / (key + ".json")).string();
  auto contents = ReadFile(path);
  if (!contents.ok()) return std::nullopt;
  json j = json::parse(*contents, nullptr, false);
  auto exchange = LlmExchange::FromJson(j);
  // A corrupt or foreign entry is treated as a miss and overwritten.
  if (!exchange.ok() || exchange->cache_key != key) return std::nullopt;
  std::lock_guard<std::mutex> lock(cache_mu_);
  memory_cache_[key] = exchange->response;
  return exchange->response;
}

absl::Status LlmClient::Store(const LlmExchange& exchange) {
  {
    std::lock_guard<std::mutex> lock(cache_mu_);
    memory_cache_[exchange.cache_key] = exchange.response;
  }
  if (options_.cache_dir.empty()) return absl::OkStatus();
  std::error_code ec;
  std::filesystem::create_directories(options_.cache_dir, ec);
  if (ec) {
    return absl::InternalError(absl::StrCat(
        "cannot create cache dir ", options_.cache_dir, ": ", ec.message()));
  }
  const std::string path =
      (std::filesystem::path(options_.cache_dir) /
       (exchange.cache_key + ".json"))
          .string();
  return WriteFileAtomic(path, exchange.ToJson().dump(2) + "\n");
}

void LlmClient::AcquireSlot() {
  std::unique_lock<std::mutex> lock(slot_mu_);
  slot_cv_.wait(lock, [this] { return in_flight_ < options_.max_in_flight; });
  ++in_flight_;
}

void LlmClient::ReleaseSlot() {
  {
    std::lock_guard<std::mutex> lock(slot_mu_);
    --in_flight_;
  }
  slot_cv_.notify_one();
}

void LlmClient::Throttle() {
  if (options_.max_requests_per_second <= 0) return;
  const auto interval = std::chrono::duration_cast<
      std::chrono::steady_clock::duration>(
      std::chrono::duration<double>(1.0 / options_.max_requests_per_second));
  std::chrono::steady_clock::time_point slot;
  {
    std::lock_guard<std::mutex> lock(rate_mu_);
    const auto now = std::chrono::steady_clock::now();
    slot = std::max(now, next_send_);
    next_send_ = slot + interval;
  }
  std::this_thread::sleep_until(slot);
}

absl::StatusOr<std::string> LlmClient::SendWithRetries(
    const CompletionRequest& request) {
  absl::Status last;
  for (int attempt = 1; attempt <= options_.max_attempts; ++attempt) {
    Throttle();
    AcquireSlot();
    backend_calls_.fetch_add(1);
    absl::StatusOr<std::string> r = backend_->Send(request);
    ReleaseSlot();
    if (r.ok()) return r;
    last = r.status();
    if (!IsTransient(last)) return last;
    if (attempt < options_.max_attempts) {
      options_.sleep(options_.base_backoff * (int64_t{1} << (attempt - 1)));
    }
  }
  return absl::UnavailableError(
      absl::StrCat("transport error after ", options_.max_attempts,
                   " attempts: ", last.message()));
}

absl::StatusOr<std::string> LlmClient::Complete(
    const CompletionRequest& request) {
  const std::string key = CacheKey(request);
  if (auto hit = Lookup(key)) {
    cache_hits_.fetch_add(1);
    return *hit;
  }
  absl::StatusOr<std::string> response = SendWithRetries(request);
  if (!response.ok()) return response.status();
  LlmExchange exchange;
  exchange.template_name = request.template_name;
  exchange.model = request.model;
  exchange.prompt = request.prompt;
  exchange.response = *response;
  exchange.cache_key = key;
  exchange.timestamp = UtcTimestamp();
  if (absl::Status st = Store(exchange); !st.ok()) return st;
  return response;
}

absl::StatusOr<std::string> LlmClient::CompleteTemplate(
    const PromptTemplate& tmpl, const SlotMap& slots, std::string_view model,
    double temperature) {
  auto prompt = tmpl.Render(slots);
  if (!prompt.ok()) return prompt.status();
  CompletionRequest request;
  request.model = std::string(model);
  request.prompt = *std::move(prompt);
  request.temperature = temperature;
  request.template_name = tmpl.name();
  request.slots = slots;
  return Complete(request);
}

}  // namespace ecr::llm
