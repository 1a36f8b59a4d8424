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

#include "ecr/metrics/coref_metrics.h"

#include <random>

#include "ecr/metrics/assignment.h"
#include "gtest/gtest.h"
#include "oracles.h"

namespace ecr::metrics {
namespace {

using oracle::Partition;

ClusterSet Set(const Partition& p) { return *ClusterSet::FromClusters(p); }

const Partition kKey = {{"a", "b", "c"}, {"d", "e"}};
const Partition kResp = {{"a", "b"}, {"c", "d", "e"}};

void ExpectPrf(const Prf& got, const oracle::Scores& want) {
  EXPECT_NEAR(got.recall, want.r, 1e-9);
  EXPECT_NEAR(got.precision, want.p, 1e-9);
  EXPECT_NEAR(got.f1, want.f, 1e-9);
}

TEST(CorefMetrics, RunningExample) {
  auto report = Conll(Set(kKey), Set(kResp));
  ASSERT_TRUE(report.ok());
  EXPECT_NEAR(report->muc.f1, 2.0 / 3.0, 1e-9);
  EXPECT_NEAR(report->b_cubed.recall, 11.0 / 15.0, 1e-9);
  EXPECT_NEAR(report->b_cubed.precision, 11.0 / 15.0, 1e-9);
  EXPECT_NEAR(report->ceaf_e.f1, 0.8, 1e-9);
  EXPECT_NEAR(report->lea.f1, 0.6, 1e-9);
  EXPECT_NEAR(report->conll_f1, (2.0 / 3.0 + 11.0 / 15.0 + 0.8) / 3.0, 1e-9);
}

TEST(CorefMetrics, IdentityScoresOne) {
  auto report = Conll(Set(kKey), Set(kKey));
  ASSERT_TRUE(report.ok());
  for (const Prf* p : {&report->muc, &report->b_cubed, &report->ceaf_e,
                       &report->lea}) {
    EXPECT_DOUBLE_EQ(p->f1, 1.0);
  }
  EXPECT_DOUBLE_EQ(report->conll_f1, 1.0);
}

TEST(CorefMetrics, AllSingletonKeyHasZeroMucRecall) {
  auto muc = Muc(Set({{"a"}, {"b"}, {"c"}}), Set({{"a", "b", "c"}}));
  ASSERT_TRUE(muc.ok());
  EXPECT_EQ(muc->recall, 0.0);
  EXPECT_EQ(muc->f1, 0.0);
}

TEST(CorefMetrics, EmptyClusteringsScoreZero) {
  auto report = Conll(ClusterSet(), ClusterSet());
  ASSERT_TRUE(report.ok());
  EXPECT_EQ(report->conll_f1, 0.0);
}

TEST(CorefMetrics, SingletonResponseAgainstOneCluster) {
  auto b3 = BCubed(Set({{"a", "b", "c"}}), Set({{"a"}, {"b"}, {"c"}}));
  ASSERT_TRUE(b3.ok());
  EXPECT_NEAR(b3->precision, 1.0, 1e-12);
  EXPECT_NEAR(b3->recall, 1.0 / 3.0, 1e-12);
}

TEST(CorefMetrics, GiantResponseCluster) {
  // k singleton keys vs one response cluster: each phi is 2/(k+1), only one
  // can be aligned.
  const int k = 5;
  Partition keys;
  std::vector<std::string> all;
  for (int i = 0; i < k; ++i) {
    keys.push_back({std::string(1, static_cast<char>('a' + i))});
    all.push_back(keys.back()[0]);
  }
  auto ceaf = CeafE(Set(keys), Set({all}));
  ASSERT_TRUE(ceaf.ok());
  EXPECT_NEAR(ceaf->recall, (2.0 / (k + 1)) / k, 1e-12);
  EXPECT_NEAR(ceaf->precision, 2.0 / (k + 1), 1e-12);
}

TEST(CorefMetrics, SingletonSelfLinkConvention) {
  auto lea = Lea(Set({{"a"}, {"b", "c"}}), Set({{"a"}, {"b", "c"}}));
  ASSERT_TRUE(lea.ok());
  EXPECT_DOUBLE_EQ(lea->f1, 1.0);
  // Merging the singleton costs it its self-link on the key side.
  auto merged = Lea(Set({{"a"}, {"b", "c"}}), Set({{"a", "b", "c"}}));
  ASSERT_TRUE(merged.ok());
  EXPECT_NEAR(merged->recall, 2.0 / 3.0, 1e-12);
  auto excluded = Lea(Set({{"a"}, {"b", "c"}}), Set({{"a", "b", "c"}}),
                      LeaSingletons::kExclude);
  ASSERT_TRUE(excluded.ok());
  EXPECT_NEAR(excluded->recall, 1.0, 1e-12);
}

TEST(CorefMetrics, UniverseMismatchIsRejected) {
  auto muc = Muc(Set({{"a", "b"}}), Set({{"a", "c"}}));
  EXPECT_EQ(muc.status().code(), absl::StatusCode::kFailedPrecondition);
  EXPECT_FALSE(Conll(Set({{"a"}}), Set({{"b"}})).ok());
}

Partition RandomPartition(std::mt19937& rng, const std::vector<std::string>& ms,
                          int max_clusters) {
  std::uniform_int_distribution<int> pick(0, max_clusters - 1);
  std::vector<std::vector<std::string>> buckets(max_clusters);
  for (const auto& m : ms) buckets[pick(rng)].push_back(m);
  Partition out;
  for (auto& b : buckets) {
    if (!b.empty()) out.push_back(b);
  }
  return out;
}

std::vector<std::string> Mentions(int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back("m" + std::to_string(i));
  return out;
}

TEST(CorefMetrics, MatchesOraclesOnRandomPartitions) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const auto ms = Mentions(1 + static_cast<int>(rng() % 12));
    const Partition key = RandomPartition(rng, ms, 6);
    const Partition resp = RandomPartition(rng, ms, 6);
    auto report = Conll(Set(key), Set(resp));
    ASSERT_TRUE(report.ok());
    ExpectPrf(report->muc, oracle::Muc(key, resp));
    ExpectPrf(report->b_cubed, oracle::BCubed(key, resp));
    ExpectPrf(report->ceaf_e, oracle::CeafE(key, resp));
    ExpectPrf(report->ceaf_e, oracle::CeafESparse(key, resp));
    ExpectPrf(report->lea, oracle::Lea(key, resp));
    auto lea_ex = Lea(Set(key), Set(resp), LeaSingletons::kExclude);
    ExpectPrf(*lea_ex, oracle::Lea(key, resp, true));
    EXPECT_NEAR(report->conll_f1,
                (report->muc.f1 + report->b_cubed.f1 + report->ceaf_e.f1) / 3,
                1e-12);
  }
}

TEST(CorefMetrics, SwappingKeyAndResponseSwapsRecallAndPrecision) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const auto ms = Mentions(2 + static_cast<int>(rng() % 10));
    const ClusterSet a = Set(RandomPartition(rng, ms, 5));
    const ClusterSet b = Set(RandomPartition(rng, ms, 5));
    auto ab = Conll(a, b);
    auto ba = Conll(b, a);
    for (auto [x, y] : {std::pair{&ab->muc, &ba->muc},
                        std::pair{&ab->b_cubed, &ba->b_cubed},
                        std::pair{&ab->ceaf_e, &ba->ceaf_e},
                        std::pair{&ab->lea, &ba->lea}}) {
      EXPECT_NEAR(x->recall, y->precision, 1e-12);
      EXPECT_NEAR(x->precision, y->recall, 1e-12);
    }
  }
}

TEST(CorefMetrics, ValuesStayInUnitInterval) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto ms = Mentions(1 + static_cast<int>(rng() % 12));
    auto r = Conll(Set(RandomPartition(rng, ms, 6)),
                   Set(RandomPartition(rng, ms, 6)));
    for (const Prf* p : {&r->muc, &r->b_cubed, &r->ceaf_e, &r->lea}) {
      for (double v : {p->recall, p->precision, p->f1}) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0 + 1e-12);
      }
    }
  }
}

TEST(CorefMetrics, ReportRendering) {
  auto report = Conll(Set(kKey), Set(kResp));
  const std::string table = report->ToTable();
  EXPECT_NE(table.find("MUC"), std::string::npos);
  EXPECT_NE(table.find("CoNLL"), std::string::npos);
  EXPECT_NE(table.find("66.7"), std::string::npos);
  EXPECT_NE(table.find("80.0"), std::string::npos);
  const auto j = report->ToJson();
  EXPECT_NEAR(j["lea"]["f1"].get<double>(), 0.6, 1e-9);
}

TEST(Assignment, RectangularMatrix) {
  auto a = MaxWeightAssignment({{1, 5, 0}, {4, 2, 0}});
  EXPECT_DOUBLE_EQ(a.total, 9);
  EXPECT_EQ(a.row_to_col[0], 1);
  EXPECT_EQ(a.row_to_col[1], 0);
  auto tall = MaxWeightAssignment({{1}, {3}, {2}});
  EXPECT_DOUBLE_EQ(tall.total, 3);
  EXPECT_DOUBLE_EQ(MaxWeightAssignment({}).total, 0);
}

}  // namespace
}  // namespace ecr::metrics
