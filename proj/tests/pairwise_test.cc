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

#include "ecr/metrics/pairwise.h"

#include <cmath>
#include <map>
#include <string>

#include "gtest/gtest.h"
#include "pairwise_replay.h"
#include "test_util.h"

namespace ecr::metrics {
namespace {

using ::ecr::testing::DataPath;
using ::ecr::testing::ReadFileOrDie;

double Round1(double fraction) { return std::round(fraction * 1000.0) / 10.0; }

TEST(ParsePairwiseCot, PlainAndMarkdownFields) {
  CotAnswer a = ParsePairwiseCot(
      "Rationales: x\nCoreferential results: Coreferential\n"
      "Coreferential score: 1\n");
  EXPECT_EQ(a.coreferential, true);
  EXPECT_EQ(a.score, 1.0);

  a = ParsePairwiseCot(
      "**Coreferential results:** Non-Coreferential\n"
      "*Coreferential score:* 0.2.\n");
  EXPECT_EQ(a.coreferential, false);
  EXPECT_EQ(a.score, 0.2);

  a = ParsePairwiseCot("coreferential result: not coreferential\n");
  EXPECT_EQ(a.coreferential, false);
  EXPECT_FALSE(a.score.has_value());

  a = ParsePairwiseCot("Coreferential results: Coreferential\n"
                       "Coreferential score: 7\n");
  EXPECT_EQ(a.coreferential, true);
  EXPECT_FALSE(a.score.has_value());

  EXPECT_FALSE(ParsePairwiseCot("The coreferential score is 0.").coreferential);
  EXPECT_FALSE(ParsePairwiseCot("").coreferential);
  EXPECT_FALSE(ParsePairwiseCot("Coreferential results: maybe").coreferential);
}

struct Transcript {
  std::string file;
  bool parses;
  bool coreferential;
  double score;
};

void CheckTranscripts(const std::string& dir,
                      const std::vector<Transcript>& expected) {
  for (const Transcript& t : expected) {
    SCOPED_TRACE(dir + "/" + t.file);
    CotAnswer a =
        ParsePairwiseCot(ReadFileOrDie(DataPath("llm_transcripts/" + dir + "/" + t.file)));
    ASSERT_EQ(a.coreferential.has_value(), t.parses);
    if (!t.parses) continue;
    EXPECT_EQ(*a.coreferential, t.coreferential);
    ASSERT_TRUE(a.score.has_value());
    EXPECT_DOUBLE_EQ(*a.score, t.score);
  }
}

TEST(ParsePairwiseCot, ZeroShotTranscripts) {
  CheckTranscripts("zero_shot", {{"gpt-4.txt", true, true, 1.0},
                                 {"gpt-3.5-turbo.txt", true, false, 0.2},
                                 {"gemini-pro.txt", true, true, 1.0},
                                 {"chat-bison-001.txt", false, false, 0.0},
                                 {"llama2-7b-chat.txt", true, true, 0.8}});
}

TEST(ParsePairwiseCot, FewShotTranscripts) {
  CheckTranscripts("few_shot", {{"gpt-4.txt", true, true, 0.95},
                                {"gpt-3.5-turbo.txt", true, true, 0.95},
                                {"gemini-pro.txt", true, true, 0.95},
                                {"chat-bison-001.txt", true, true, 0.99},
                                {"llama2-7b-chat.txt", true, true, 0.99}});
}

TEST(PairwiseReport, CountsReproduceGpt4ZeroShotRow) {
  const ::ecr::testing::ReplayCounts c;
  PairwiseReport r = PairwiseReport::FromCounts(c.tp, c.fp, c.tn, c.fn,
                                                c.incomplete);
  EXPECT_EQ(r.n_total, 6662u);
  EXPECT_EQ(r.n_complete, 6656u);
  EXPECT_DOUBLE_EQ(r.recall, 2136.0 / 2280.0);
  EXPECT_DOUBLE_EQ(r.precision, 2136.0 / 3715.0);
  EXPECT_DOUBLE_EQ(r.positive_rate, 3715.0 / 6656.0);
  EXPECT_DOUBLE_EQ(r.tcomp, 6656.0 / 6662.0);
  EXPECT_DOUBLE_EQ(r.accuracy, 4933.0 / 6662.0);
  EXPECT_EQ(Round1(r.recall), 93.7);
  EXPECT_EQ(Round1(r.precision), 57.5);
  EXPECT_EQ(Round1(r.f1), 71.3);
  EXPECT_EQ(Round1(r.positive_rate), 55.8);
  EXPECT_EQ(Round1(r.tcomp), 99.9);
  EXPECT_EQ(Round1(r.accuracy), 74.0);
}

TEST(PairwiseReport, ZeroDenominatorsGiveZero) {
  PairwiseReport r = PairwiseReport::FromCounts(0, 0, 0, 0, 0);
  EXPECT_EQ(r.recall, 0.0);
  EXPECT_EQ(r.f1, 0.0);
  EXPECT_EQ(r.tcomp, 0.0);
  r = PairwiseReport::FromCounts(0, 0, 0, 0, 3);
  EXPECT_EQ(r.tcomp, 0.0);
  EXPECT_EQ(r.accuracy, 0.0);
}

TEST(ComputePairwiseReport, TalliesAgainstGold) {
  std::map<std::string, bool, std::less<>> gold = {
      {"a", true}, {"b", true}, {"c", false}, {"d", false}, {"e", true}};
  auto r = ComputePairwiseReport(gold, {{"a", true},
                                        {"b", false},
                                        {"c", true},
                                        {"d", false},
                                        {"e", std::nullopt}});
  ASSERT_TRUE(r.ok()) << r.status();
  EXPECT_EQ(r->tp, 1u);
  EXPECT_EQ(r->fn, 1u);
  EXPECT_EQ(r->fp, 1u);
  EXPECT_EQ(r->tn, 1u);
  EXPECT_EQ(r->n_total, 5u);
  EXPECT_DOUBLE_EQ(r->tcomp, 0.8);
  EXPECT_DOUBLE_EQ(r->accuracy, 0.4);
  nlohmann::json j = r->ToJson();
  EXPECT_EQ(j["n_complete"], 4);

  EXPECT_FALSE(ComputePairwiseReport(gold, {{"zzz", true}}).ok());
  EXPECT_FALSE(ComputePairwiseReport({{"a", true}}, {{"a", true}, {"a", true}})
                   .ok());
  EXPECT_FALSE(ComputePairwiseReport(gold, {{"a", true}}).ok());
}

}  // namespace
}  // namespace ecr::metrics
