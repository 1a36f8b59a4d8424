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

#include "ecr/augment.h"

#include <map>
#include <string>

#include "augment_invariants.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace ecr {
namespace {

using ::ecr::testing::FixtureTrainPairs;
using ::ecr::testing::InvariantViolations;
using ::ecr::testing::MockClient;
using ::ecr::testing::PairById;
using ::testing::IsEmpty;

constexpr char kEstherPair[] = "t1_a_m02|t1_b_m04";
constexpr char kMicrosoftPair[] = "t2_a_m03|t2_b_m06";

class AugmentKinds : public ::testing::TestWithParam<AugmentKind> {};

TEST_P(AugmentKinds, EveryPairSatisfiesInvariants) {
  const PairDataset ds = FixtureTrainPairs();
  auto client = MockClient();
  auto result = GenerateForDataset(GetParam(), ds.pairs, *client, {}, 4);
  ASSERT_TRUE(result.ok()) << result.status();
  ASSERT_FALSE(result->pairs.empty());
  std::map<std::string, const MentionPair*> sources;
  for (const MentionPair& p : ds.pairs) sources[p.pair_id] = &p;
  for (const AugmentedPair& a : result->pairs) {
    ASSERT_TRUE(sources.count(a.source_pair_id));
    EXPECT_THAT(InvariantViolations(*sources[a.source_pair_id], a), IsEmpty());
    EXPECT_EQ(a.kind, GetParam());
  }
  EXPECT_EQ(result->stats.dropped_parse, 0);
}

TEST_P(AugmentKinds, RerunsAreByteIdentical) {
  const PairDataset ds = FixtureTrainPairs();
  std::string first;
  for (int run = 0; run < 3; ++run) {
    auto client = MockClient();
    auto result = GenerateForDataset(GetParam(), ds.pairs, *client, {}, 1 + run);
    ASSERT_TRUE(result.ok());
    auto plan = AugmentationPlan::Create(2, 5, 42);
    auto mixed = MixDataset(ds, result->pairs, *plan);
    ASSERT_TRUE(mixed.ok());
    std::string bytes = SerializeAugmented(result->pairs) +
                        SerializePairs(mixed->dataset.pairs);
    if (run == 0) {
      first = bytes;
    } else {
      EXPECT_EQ(bytes, first) << "run " << run;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(All, AugmentKinds,
                         ::testing::Values(AugmentKind::kCad, AugmentKind::kTia,
                                           AugmentKind::kCia, AugmentKind::kTad),
                         [](const auto& info) {
                           return std::string(AugmentKindName(info.param));
                         });

TEST(Augment, EstherCadMatchesPublishedExample) {
  const PairDataset ds = FixtureTrainPairs();
  const MentionPair& source = PairById(ds, kEstherPair);
  ASSERT_EQ(source.label, PairLabel::kCoref);
  auto client = MockClient();
  auto result = GenerateAugmentations(AugmentKind::kCad, source, *client);
  ASSERT_TRUE(result.ok()) << result.status();
  ASSERT_FALSE(result->pairs.empty());
  const AugmentedPair& a = result->pairs[0];
  EXPECT_EQ(a.pair.first.center,
            "The renowned musician Prince departed from this world in his "
            "studio in Minneapolis at the age of 57.");
  EXPECT_EQ(a.pair.first.trigger(), "departed");
  EXPECT_EQ(a.pair.label, PairLabel::kNotCoref);
  // Coref CAD only swaps the first center.
  EXPECT_EQ(a.pair.first.prefix, source.first.prefix);
  EXPECT_EQ(a.pair.first.suffix, source.first.suffix);
  EXPECT_EQ(a.pair.second, source.second);
  ASSERT_EQ(a.edit_ledger.size(), 1u);
  EXPECT_EQ(a.edit_ledger[0].action, "generate");
}

TEST(Augment, EstherTiaKeepsOriginalTrigger) {
  const PairDataset ds = FixtureTrainPairs();
  const MentionPair& source = PairById(ds, kEstherPair);
  auto client = MockClient();
  auto result = GenerateAugmentations(AugmentKind::kTia, source, *client);
  ASSERT_TRUE(result.ok()) << result.status();
  ASSERT_FALSE(result->pairs.empty());
  for (const AugmentedPair& a : result->pairs) {
    EXPECT_EQ(a.pair.first.trigger(), "died");
    EXPECT_THAT(InvariantViolations(source, a), IsEmpty());
  }
}

TEST(Augment, MicrosoftNotCorefCadRebuildsFirstWindow) {
  const PairDataset ds = FixtureTrainPairs();
  const MentionPair& source = PairById(ds, kMicrosoftPair);
  ASSERT_EQ(source.label, PairLabel::kNotCoref);
  auto client = MockClient();
  auto result = GenerateAugmentations(AugmentKind::kCad, source, *client);
  ASSERT_TRUE(result.ok()) << result.status();
  ASSERT_FALSE(result->pairs.empty());
  const AugmentedPair& a = result->pairs[0];
  EXPECT_EQ(a.pair.label, PairLabel::kCoref);
  EXPECT_EQ(a.pair.first.center,
            "A statement from Microsoft confirms that the company has secured "
            "its customers from malicious attacks by releasing a security "
            "update for Internet Explorer.");
  EXPECT_EQ(a.pair.first.trigger(), "secured");
  EXPECT_TRUE(a.Modified(Segment::kFirstPrefix));
  EXPECT_EQ(a.pair.second, source.second);
  EXPECT_THAT(InvariantViolations(source, a), IsEmpty());
}

TEST(Augment, MixCapsPerOriginalAndSkipsIneligible) {
  const PairDataset ds = FixtureTrainPairs();
  auto client = MockClient();
  auto result = GenerateForDataset(AugmentKind::kCad, ds.pairs, *client);
  ASSERT_TRUE(result.ok());
  auto plan = AugmentationPlan::Create(1, 3, 7);
  ASSERT_TRUE(plan.ok());
  auto mixed = MixDataset(ds, result->pairs, *plan);
  ASSERT_TRUE(mixed.ok()) << mixed.status();
  std::map<std::string, int> per_source;
  std::map<std::string, int> rank;
  for (const MentionPair& p : ds.pairs) rank[p.pair_id] = p.rank;
  for (const AugmentedPair& a : mixed->chosen) {
    ++per_source[a.source_pair_id];
    EXPECT_LE(rank[a.source_pair_id], 3);
  }
  for (const auto& [id, n] : per_source) EXPECT_EQ(n, 1) << id;
  EXPECT_EQ(mixed->dataset.pairs.size(), ds.pairs.size() + mixed->chosen.size());
  // Originals come first, untouched.
  for (size_t i = 0; i < ds.pairs.size(); ++i) {
    EXPECT_EQ(mixed->dataset.pairs[i], ds.pairs[i]);
  }

  std::vector<AugmentedPair> stray = {result->pairs[0]};
  stray[0].source_pair_id = "nobody|nowhere";
  EXPECT_FALSE(MixDataset(ds, stray, *plan).ok());
  EXPECT_FALSE(AugmentationPlan::Create(0, 5, 0).ok());
  EXPECT_FALSE(AugmentationPlan::Create(2, 0, 0).ok());
}

TEST(Augment, JsonlRoundTrip) {
  const PairDataset ds = FixtureTrainPairs();
  auto client = MockClient();
  auto result = GenerateAugmentations(AugmentKind::kCia,
                                      PairById(ds, kEstherPair), *client);
  ASSERT_TRUE(result.ok());
  auto back = ParseAugmented(SerializeAugmented(result->pairs));
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(*back, result->pairs);
}

TEST(Augment, UnusableResponsesAreCountedNotFatal) {
  const PairDataset ds = FixtureTrainPairs();
  auto backend = std::make_unique<llm::ScriptedBackend>(
      std::vector<absl::StatusOr<std::string>>{std::string("no structure here")});
  llm::LlmClient client(std::move(backend), {});
  auto result = GenerateAugmentations(AugmentKind::kCad,
                                      PairById(ds, kEstherPair), client);
  ASSERT_TRUE(result.ok()) << result.status();
  EXPECT_TRUE(result->pairs.empty());
  EXPECT_GT(result->stats.dropped_parse, 0);
  EXPECT_FALSE(result->stats.warnings.empty());
}

TEST(Augment, PlausibilityProxyBounds) {
  const PairDataset ds = FixtureTrainPairs();
  const MentionPair& p = PairById(ds, kEstherPair);
  EXPECT_DOUBLE_EQ(PlausibilityProxy(p, p), 1.0);
  MentionPair other = PairById(ds, kMicrosoftPair);
  const double s = PlausibilityProxy(p, other);
  EXPECT_GE(s, 0.0);
  EXPECT_LT(s, 1.0);
}

TEST(Augment, KindNames) {
  for (AugmentKind k : {AugmentKind::kCad, AugmentKind::kTia, AugmentKind::kCia,
                        AugmentKind::kTad}) {
    EXPECT_EQ(*ParseAugmentKind(AugmentKindName(k)), k);
  }
  EXPECT_FALSE(ParseAugmentKind("xyz").ok());
  EXPECT_EQ(*ParseSegment(SegmentName(Segment::kSecondSuffix)),
            Segment::kSecondSuffix);
}

}  // namespace
}  // namespace ecr
