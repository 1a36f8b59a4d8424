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

#include <atomic>
#include <filesystem>
#include <string>
#include <thread>

#include "ecr/llm/client.h"
#include "ecr/llm/prompt.h"
#include "ecr/llm/response_parser.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "httplib.h"
#include "test_util.h"

namespace ecr::llm {
namespace {

using ::ecr::testing::DataPath;
using ::ecr::testing::ScratchDir;
using ::testing::ElementsAre;
using ::testing::HasSubstr;

TEST(Prompt, BuiltinsRenderWithAllSlots) {
  EXPECT_THAT(BuiltinTemplateNames(),
              ElementsAre("ce", "nce", "para", "syn_ce", "syn_nce", "tc"));
  const PromptTemplate* t = FindBuiltinTemplate("syn_nce");
  ASSERT_NE(t, nullptr);
  auto text = t->Render({{"trigger", "died"}, {"sentence", "She died."}});
  ASSERT_TRUE(text.ok());
  EXPECT_THAT(*text, HasSubstr("Given word: 'died' from 'She died.'"));
  EXPECT_THAT(*text, HasSubstr("Step2:"));
  // The demonstration comes first.
  EXPECT_LT(text->find(t->demonstration().substr(0, 40)),
            text->find("Given word: 'died'"));
  EXPECT_FALSE(t->Render({{"trigger", "died"}}).ok());
  EXPECT_EQ(FindBuiltinTemplate("nope"), nullptr);
}

TEST(Prompt, CreateChecksPlaceholders) {
  EXPECT_FALSE(PromptTemplate::Create("x", {OperatorKind::kSyn}, {"a"}, "",
                                      "{a} {b}", ResponseFormat::kMentionList)
                   .ok());
  EXPECT_FALSE(PromptTemplate::Create("x", {}, {"a"}, "", "{a}",
                                      ResponseFormat::kMentionList)
                   .ok());
  auto ok = PromptTemplate::Create("x", {OperatorKind::kPara}, {"a"}, "",
                                   "{a} and {Literal} {", ResponseFormat::kContexts);
  ASSERT_TRUE(ok.ok()) << ok.status();
  EXPECT_EQ(*ok->Render({{"a", "1"}}), "1 and {Literal} {");
}

TEST(ResponseParser, Generation) {
  auto g = ParseGeneration(
      "Step1:\nExpressions: passed away, 'departed', perished.\n\n"
      "Step2:\n1. The musician passed away.\n2. \"A singer departed.\"\n"
      "3.\nnot a numbered line\n");
  ASSERT_TRUE(g.ok()) << g.status();
  EXPECT_THAT(g->synonyms, ElementsAre("passed away", "departed", "perished"));
  EXPECT_THAT(g->mention_sentences,
              ElementsAre("The musician passed away.", "A singer departed."));
  EXPECT_FALSE(ParseGeneration("1. only sentences").ok());
  EXPECT_FALSE(ParseGeneration("Expressions: a, b").ok());
}

TEST(ResponseParser, MentionListAndParaphrases) {
  EXPECT_THAT(*ParseMentionList("1. a\n2. b"), ElementsAre("a", "b"));
  EXPECT_FALSE(ParseMentionList("nothing").ok());

  auto c = ParseParaphrases(
      "Prefix:\n1. p one\n2. p two\nSuffixes:\n1. s one\n");
  ASSERT_TRUE(c.ok());
  EXPECT_THAT(c->prefixes, ElementsAre("p one", "p two"));
  EXPECT_THAT(c->suffixes, ElementsAre("s one"));
  EXPECT_FALSE(ParseParaphrases("Prefix:\n1. p\n").ok());
  EXPECT_TRUE(ParseParaphrases("Prefix:\n1. p\n", true, false).ok());
  EXPECT_FALSE(ParseParaphrases("Prefix:\nSuffix:\n1. s\n").ok());
}

ClientOptions NoSleep(std::vector<std::chrono::milliseconds>* sleeps) {
  ClientOptions o;
  o.sleep = [sleeps](std::chrono::milliseconds d) { sleeps->push_back(d); };
  return o;
}

CompletionRequest Req(std::string prompt) {
  CompletionRequest r;
  r.prompt = std::move(prompt);
  r.template_name = "nce";
  return r;
}

TEST(LlmClient, RetriesTransientErrorsWithExponentialBackoff) {
  std::vector<std::chrono::milliseconds> sleeps;
  LlmClient client(std::make_unique<ScriptedBackend>(
                       std::vector<absl::StatusOr<std::string>>{
                           absl::ResourceExhaustedError("429"),
                           absl::UnavailableError("503"), std::string("ok")}),
                   NoSleep(&sleeps));
  auto r = client.Complete(Req("p"));
  ASSERT_TRUE(r.ok()) << r.status();
  EXPECT_EQ(*r, "ok");
  EXPECT_EQ(client.backend_calls(), 3);
  EXPECT_THAT(sleeps, ElementsAre(std::chrono::milliseconds(500),
                                  std::chrono::milliseconds(1000)));
}

TEST(LlmClient, GivesUpAfterMaxAttempts) {
  std::vector<std::chrono::milliseconds> sleeps;
  LlmClient client(std::make_unique<ScriptedBackend>(
                       std::vector<absl::StatusOr<std::string>>{
                           absl::ResourceExhaustedError("429")}),
                   NoSleep(&sleeps));
  auto r = client.Complete(Req("p"));
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.status().code(), absl::StatusCode::kUnavailable);
  EXPECT_THAT(std::string(r.status().message()), HasSubstr("5 attempts"));
  EXPECT_EQ(client.backend_calls(), 5);
  EXPECT_EQ(sleeps.size(), 4u);
}

TEST(LlmClient, RefusalIsNotRetried) {
  std::vector<std::chrono::milliseconds> sleeps;
  LlmClient client(std::make_unique<ScriptedBackend>(
                       std::vector<absl::StatusOr<std::string>>{
                           RefusalError("I can't help with that."),
                           std::string("never")}),
                   NoSleep(&sleeps));
  auto r = client.Complete(Req("p"));
  ASSERT_FALSE(r.ok());
  EXPECT_TRUE(IsRefusal(r.status()));
  EXPECT_FALSE(IsTransient(r.status()));
  EXPECT_EQ(client.backend_calls(), 1);
  EXPECT_TRUE(sleeps.empty());
}

TEST(LlmClient, DiskCacheAvoidsRepeatCalls) {
  const auto dir = ScratchDir("llm_cache");
  ClientOptions options;
  options.cache_dir = dir.string();
  {
    LlmClient client(std::make_unique<ScriptedBackend>(
                         std::vector<absl::StatusOr<std::string>>{
                             std::string("first"), std::string("second")}),
                     options);
    EXPECT_EQ(*client.Complete(Req("same")), "first");
    EXPECT_EQ(*client.Complete(Req("same")), "first");
    EXPECT_EQ(client.backend_calls(), 1);
    EXPECT_EQ(client.cache_hits(), 1);
  }
  // A new client over the same directory replays from disk.
  LlmClient again(std::make_unique<ScriptedBackend>(
                      std::vector<absl::StatusOr<std::string>>{
                          absl::UnavailableError("offline")}),
                  options);
  EXPECT_EQ(*again.Complete(Req("same")), "first");
  EXPECT_EQ(again.backend_calls(), 0);

  const std::string key = CacheKey(Req("same"));
  const auto file = dir / (key + ".json");
  ASSERT_TRUE(std::filesystem::exists(file));
  auto ex = LlmExchange::FromJson(
      nlohmann::json::parse(::ecr::testing::ReadFileOrDie(file)));
  ASSERT_TRUE(ex.ok());
  EXPECT_EQ(ex->prompt, "same");
  EXPECT_EQ(ex->response, "first");
  EXPECT_EQ(ex->cache_key, key);
}

TEST(LlmClient, CacheKeyCoversModelAndTemperature) {
  CompletionRequest a = Req("p");
  CompletionRequest b = a;
  b.model = "gpt-4";
  CompletionRequest c = a;
  c.temperature = 0.7;
  EXPECT_EQ(CacheKey(a), CacheKey(Req("p")));
  EXPECT_NE(CacheKey(a), CacheKey(b));
  EXPECT_NE(CacheKey(a), CacheKey(c));
  EXPECT_EQ(CacheKey(a).size(), 64u);
}

TEST(LlmClient, InFlightLimitIsRespected) {
  class SlowBackend : public ChatBackend {
   public:
    absl::StatusOr<std::string> Send(const CompletionRequest& r) override {
      const int now = ++active_;
      int seen = peak_.load();
      while (now > seen && !peak_.compare_exchange_weak(seen, now)) {
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
      --active_;
      return r.prompt;
    }
    std::atomic<int> active_{0};
    std::atomic<int> peak_{0};
  };
  auto backend = std::make_unique<SlowBackend>();
  SlowBackend* raw = backend.get();
  ClientOptions options;
  options.max_in_flight = 2;
  LlmClient client(std::move(backend), options);
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&client, i] {
      EXPECT_TRUE(client.Complete(Req(std::to_string(i))).ok());
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_LE(raw->peak_.load(), 2);
}

TEST(MockBackend, SubstringBeatsTemplateDefault) {
  auto mock = MockBackend::FromJson(nlohmann::json::parse(R"({"responses":[
      {"template":"nce","response":"1. default {trigger}"},
      {"template":"nce","contains":"needle","response":"1. matched"},
      {"template":"nce","contains":"needle","response":"1. shadowed"}]})"));
  ASSERT_TRUE(mock.ok()) << mock.status();
  CompletionRequest r = Req("hay needle hay");
  EXPECT_EQ(*(*mock)->Send(r), "1. matched");
  r = Req("hay");
  r.slots = {{"trigger", "died"}};
  EXPECT_EQ(*(*mock)->Send(r), "1. default died");
  r.template_name = "tc";
  EXPECT_EQ((*mock)->Send(r).status().code(), absl::StatusCode::kNotFound);
  EXPECT_TRUE(MockBackend::FromFile(DataPath("mock_llm.json")).ok());
  EXPECT_FALSE(MockBackend::FromFile(DataPath("absent.json")).ok());
}

class FakeOpenAi {
 public:
  FakeOpenAi() {
    server_.Post("/v1/chat/completions",
                 [this](const httplib::Request& req, httplib::Response& res) {
                   last_body_ = req.body;
                   auth_ = req.get_header_value("Authorization");
                   res.status = status_;
                   res.set_content(reply_, "application/json");
                 });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeOpenAi() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  int status_ = 200;
  std::string reply_;
  std::string last_body_;
  std::string auth_;
};

TEST(OpenAiBackend, MapsHttpOutcomes) {
  setenv("ECR_TEST_KEY", "sk-test", 1);
  FakeOpenAi fake;
  HttpBackendOptions o;
  o.base_url = fake.url();
  o.api_key_env = "ECR_TEST_KEY";
  o.timeout = std::chrono::seconds(5);
  auto backend = OpenAiBackend::Create(o);
  ASSERT_TRUE(backend.ok()) << backend.status();

  fake.reply_ = R"({"choices":[{"message":{"content":"hello"},"finish_reason":"stop"}]})";
  auto r = (*backend)->Send(Req("prompt text"));
  ASSERT_TRUE(r.ok()) << r.status();
  EXPECT_EQ(*r, "hello");
  EXPECT_EQ(fake.auth_, "Bearer sk-test");
  auto sent = nlohmann::json::parse(fake.last_body_);
  EXPECT_EQ(sent["messages"][0]["content"], "prompt text");
  EXPECT_EQ(sent["temperature"], 0.0);

  fake.status_ = 429;
  EXPECT_EQ((*backend)->Send(Req("p")).status().code(),
            absl::StatusCode::kResourceExhausted);
  fake.status_ = 503;
  EXPECT_TRUE(IsTransient((*backend)->Send(Req("p")).status()));
  fake.status_ = 400;
  EXPECT_FALSE(IsTransient((*backend)->Send(Req("p")).status()));
  fake.status_ = 200;
  fake.reply_ = R"({"choices":[{"message":{"content":null,"refusal":"no"}}]})";
  EXPECT_TRUE(IsRefusal((*backend)->Send(Req("p")).status()));
  fake.reply_ = R"({"choices":[{"message":{"content":"x"},"finish_reason":"content_filter"}]})";
  EXPECT_TRUE(IsRefusal((*backend)->Send(Req("p")).status()));
  fake.reply_ = "not json";
  EXPECT_EQ((*backend)->Send(Req("p")).status().code(),
            absl::StatusCode::kDataLoss);

  unsetenv("ECR_TEST_KEY");
  EXPECT_FALSE(OpenAiBackend::Create(o).ok());
}

}  // namespace
}  // namespace ecr::llm
