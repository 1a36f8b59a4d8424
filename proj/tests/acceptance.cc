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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails. The ECB+ integration check prints SKIP unless
// ECR_ECBPLUS_DIR points at {train,dev,test}.jsonl in the toolkit schema.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "augment_invariants.h"
#include "ecr/augment.h"
#include "ecr/cli/commands.h"
#include "ecr/cluster.h"
#include "ecr/corpus.h"
#include "ecr/metrics/coref_metrics.h"
#include "ecr/metrics/pairwise.h"
#include "ecr/pairing.h"
#include "ecr/scorer.h"
#include "ecr/strings.h"
#include "ecr/triggersim.h"
#include "oracles.h"
#include "pairwise_replay.h"
#include "pipeline_oracle.h"
#include "test_util.h"

namespace ecr {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using oracle::Partition;

enum class Outcome { kPass, kFail, kSkip };

struct Verdict {
  Outcome outcome = Outcome::kPass;
  std::string detail;
};

// Collects failure notes; the first few are reported.
class Notes {
 public:
  void Fail(std::string what) {
    ++failures_;
    if (first_.size() < 3) first_.push_back(std::move(what));
  }
  void Check(bool ok, std::string what) {
    if (!ok) Fail(std::move(what));
  }
  bool ok() const { return failures_ == 0; }
  Verdict Finish(std::string pass_detail) const {
    if (ok()) return {Outcome::kPass, std::move(pass_detail)};
    std::string d = absl::StrCat(failures_, " problem(s): ");
    for (size_t i = 0; i < first_.size(); ++i) {
      absl::StrAppend(&d, i ? "; " : "", first_[i]);
    }
    return {Outcome::kFail, d};
  }

 private:
  int failures_ = 0;
  std::vector<std::string> first_;
};

bool Near(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

ClusterSet ToSet(const Partition& p) {
  auto s = ClusterSet::FromClusters(p);
  if (!s.ok()) std::abort();
  return *std::move(s);
}

Partition RandomPartition(std::mt19937& rng, int n_mentions, int max_clusters) {
  const int k = 1 + static_cast<int>(rng() % max_clusters);
  Partition p(k);
  for (int i = 0; i < n_mentions; ++i) {
    p[rng() % k].push_back("m" + std::to_string(i));
  }
  Partition out;
  for (auto& c : p) {
    if (!c.empty()) out.push_back(std::move(c));
  }
  return out;
}

Verdict MetricOracleSuite() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937 rng(2024);
  Notes notes;
  const int kTrials = 250;
  auto cmp = [&](const char* m, int t, const metrics::Prf& got,
                 const oracle::Scores& want) {
    notes.Check(Near(got.recall, want.r, 1e-9) &&
                    Near(got.precision, want.p, 1e-9) &&
                    Near(got.f1, want.f, 1e-9),
                absl::StrCat(m, " trial ", t));
  };
  for (int t = 0; t < kTrials; ++t) {
    const int n = 1 + static_cast<int>(rng() % 12);
    const Partition key = RandomPartition(rng, n, 6);
    const Partition resp = RandomPartition(rng, n, 6);
    const ClusterSet k = ToSet(key), r = ToSet(resp);
    cmp("MUC", t, *metrics::Muc(k, r), oracle::Muc(key, resp));
    cmp("B3", t, *metrics::BCubed(k, r), oracle::BCubed(key, resp));
    cmp("CEAF_e", t, *metrics::CeafE(k, r), oracle::CeafE(key, resp));
    cmp("LEA", t, *metrics::Lea(k, r), oracle::Lea(key, resp));
  }
  const double secs = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  notes.Check(secs < 30.0, absl::StrFormat("took %.1fs", secs));
  return notes.Finish(
      absl::StrFormat("%d random partitions, %.2fs", kTrials, secs));
}

Verdict WorkedExample() {
  const ClusterSet key = ToSet({{"a", "b", "c"}, {"d", "e"}});
  const ClusterSet resp = ToSet({{"a", "b"}, {"c", "d", "e"}});
  auto r = metrics::Conll(key, resp);
  Notes notes;
  if (!r.ok()) return {Outcome::kFail, std::string(r.status().message())};
  // B3 per mention: a, b get 2/3, c gets 1/3, d, e get 1; both sides 11/15.
  notes.Check(Near(r->muc.f1, 2.0 / 3.0, 1e-6), "MUC");
  notes.Check(Near(r->b_cubed.f1, 11.0 / 15.0, 1e-6), "B3");
  notes.Check(Near(r->ceaf_e.f1, 0.8, 1e-6), "CEAF_e");
  notes.Check(Near(r->lea.f1, 0.6, 1e-6), "LEA");
  notes.Check(Near(r->conll_f1, (2.0 / 3.0 + 11.0 / 15.0 + 0.8) / 3, 1e-6),
              "CoNLL");
  return notes.Finish(absl::StrFormat(
      "MUC %.4f B3 %.4f CEAF_e %.4f LEA %.4f CoNLL %.4f", r->muc.f1,
      r->b_cubed.f1, r->ceaf_e.f1, r->lea.f1, r->conll_f1));
}

constexpr AugmentKind kKinds[] = {AugmentKind::kCad, AugmentKind::kTia,
                                  AugmentKind::kCia, AugmentKind::kTad};

Verdict AugmentationInvariants() {
  Notes notes;
  const PairDataset ds = testing::FixtureTrainPairs();
  std::map<std::string, const MentionPair*> sources;
  for (const MentionPair& p : ds.pairs) sources[p.pair_id] = &p;
  size_t checked = 0;
  std::map<AugmentKind, std::string> first_bytes;
  for (int run = 0; run < 3; ++run) {
    for (AugmentKind kind : kKinds) {
      auto client = testing::MockClient();
      auto result = GenerateForDataset(kind, ds.pairs, *client, {}, 1 + run);
      if (!result.ok()) {
        notes.Fail(std::string(result.status().message()));
        continue;
      }
      auto plan = AugmentationPlan::Create(2, 5, 42);
      auto mixed = MixDataset(ds, result->pairs, *plan);
      if (!mixed.ok()) {
        notes.Fail(std::string(mixed.status().message()));
        continue;
      }
      const std::string bytes = SerializeAugmented(result->pairs) +
                                SerializePairs(mixed->dataset.pairs);
      if (run == 0) {
        notes.Check(!result->pairs.empty(),
                    absl::StrCat(AbslSv(AugmentKindName(kind)), " produced nothing"));
        first_bytes[kind] = bytes;
        for (const AugmentedPair& a : result->pairs) {
          for (const std::string& v :
               testing::InvariantViolations(*sources.at(a.source_pair_id), a)) {
            notes.Fail(v);
          }
          ++checked;
        }
      } else {
        notes.Check(bytes == first_bytes[kind],
                    absl::StrCat(AbslSv(AugmentKindName(kind)), " rerun ", run,
                                 " differs"));
      }
    }
  }

  auto client = testing::MockClient();
  auto cad = GenerateAugmentations(
      AugmentKind::kCad, testing::PairById(ds, "t1_a_m02|t1_b_m04"), *client);
  const std::string expected =
      "The renowned musician Prince departed from this world in his studio "
      "in Minneapolis at the age of 57.";
  notes.Check(cad.ok() && !cad->pairs.empty() &&
                  cad->pairs[0].pair.first.center == expected,
              "Esther CAD center sentence differs from the reference rewrite");
  return notes.Finish(absl::StrCat(checked,
                                   " augmented pairs, 3 identical reruns, "
                                   "Esther CAD byte-equal"));
}

Verdict BiasShift() {
  const PairDataset ds = testing::FixtureTrainPairs();
  auto pct = [&](const std::vector<MentionPair>& pairs) -> double {
    auto h = ComputeBiasHistogram(pairs, HeadLemmaNormalizer());
    return h.ok() && h->percent_similar_coref ? *h->percent_similar_coref * 100
                                              : -1;
  };
  auto with = [&](AugmentKind kind) -> double {
    auto client = testing::MockClient();
    auto result = GenerateForDataset(kind, ds.pairs, *client);
    if (!result.ok()) return -1;
    std::vector<MentionPair> all = ds.pairs;
    for (const AugmentedPair& a : result->pairs) all.push_back(a.pair);
    return pct(all);
  };
  const double ori = pct(ds.pairs);
  const double tia = with(AugmentKind::kTia);
  const double cad = with(AugmentKind::kCad);
  const std::string detail = absl::StrFormat(
      "ORI+TIA %.2f%% > ORI %.2f%% > ORI+CAD %.2f%%", tia, ori, cad);
  if (tia > ori && ori > cad && cad >= 0) return {Outcome::kPass, detail};
  return {Outcome::kFail, detail};
}

std::u32string U32(const std::string& s) {
  auto v = DecodeUtf8(s);
  return {v.begin(), v.end()};
}

Verdict FuzzSuite() {
  Notes notes;
  const std::vector<std::pair<std::string, std::string>> cases = {
      {"die", "died"},          {"die", "pass"},
      {"attack", "attacks"},    {"fix", "fixed"},
      {"release", "released"},  {"hack", "hacking"},
      {"address", "addresses"}, {"protect", "secure"},
      {"announce", "confirm"},  {"rush out", "rush"},
      {"depart", "die"},        {"snap", "snapped"},
      {"star", "starring"},     {"continue", "continued"},
      {"achieve", "achievement"},
      {"this is a test", "this is a test!"},
      {"fuzzy wuzzy was a bear", "wuzzy fuzzy was a bear"},
      {"café", "cafe"},         {"expire", "perish"},
      {"left us", "pass away"},
  };
  for (const auto& [a, b] : cases) {
    const int got = *FuzzRatio(a, b);
    notes.Check(got == oracle::FuzzRatio(U32(a), U32(b)),
                absl::StrCat(a, " / ", b, " gave ", got));
    notes.Check(got == *FuzzRatio(b, a), absl::StrCat(a, " / ", b, " asymmetric"));
    notes.Check(*FuzzRatio(a, a) == 100, absl::StrCat(a, " identity"));
  }
  return notes.Finish(absl::StrCat(cases.size(),
                                   " oracle cases, symmetry and identity hold"));
}

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun Cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::RunCli(args, out, err);
  return {code, out.str(), err.str()};
}

std::map<std::string, std::string> Snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::string bytes = testing::ReadFileOrDie(e.path());
    if (e.path().filename().string().ends_with(".manifest.json")) {
      json m = json::parse(bytes);
      m.erase("created_at");
      bytes = m.dump();
    }
    out[e.path().filename().string()] = bytes;
  }
  return out;
}

Verdict PipelineDeterminism() {
  Notes notes;
  const fs::path dir = testing::ScratchDir("acceptance_pipeline");
  const std::vector<std::string> args = {
      "pipeline", "--corpus", testing::DataPath("fixture_corpus.jsonl"),
      "--split",  "test",     "--out", dir.string(), "--json"};
  CliRun first = Cli(args);
  if (first.code != 0) return {Outcome::kFail, first.err};
  const auto snap = Snapshot(dir);
  fs::remove_all(dir);
  CliRun second = Cli(args);
  if (second.code != 0) return {Outcome::kFail, second.err};
  notes.Check(Snapshot(dir) == snap, "artifacts differ between runs");

  const auto expect = testing::DerivePipelineExpectation(
      testing::FixtureCorpus(Split::kTest), kDefaultInferenceNeighbors,
      kDefaultWindowRadius);
  json report = json::parse(testing::ReadFileOrDie(dir / "report.json"));
  auto cmp = [&](const char* m, const oracle::Scores& s) {
    notes.Check(Near(report[m]["recall"].get<double>(), s.r, 1e-9) &&
                    Near(report[m]["precision"].get<double>(), s.p, 1e-9) &&
                    Near(report[m]["f1"].get<double>(), s.f, 1e-9),
                absl::StrCat(m, " differs from derived expectation"));
  };
  cmp("muc", expect.muc);
  cmp("b_cubed", expect.b_cubed);
  cmp("ceaf_e", expect.ceaf_e);
  cmp("lea", expect.lea);
  notes.Check(Near(report["conll_f1"].get<double>(), expect.conll, 1e-9),
              "CoNLL differs from derived expectation");
  return notes.Finish(absl::StrFormat(
      "%d artifacts identical; CoNLL %.2f matches derived", snap.size(),
      100 * expect.conll));
}

Verdict PairwiseTcomp() {
  Notes notes;
  struct Row {
    std::string dir, file;
    bool parses;
  };
  const std::vector<Row> rows = {
      {"zero_shot", "gpt-4.txt", true},
      {"zero_shot", "gpt-3.5-turbo.txt", true},
      {"zero_shot", "gemini-pro.txt", true},
      {"zero_shot", "chat-bison-001.txt", false},
      {"zero_shot", "llama2-7b-chat.txt", true},
      {"few_shot", "gpt-4.txt", true},
      {"few_shot", "gpt-3.5-turbo.txt", true},
      {"few_shot", "gemini-pro.txt", true},
      {"few_shot", "chat-bison-001.txt", true},
      {"few_shot", "llama2-7b-chat.txt", true},
  };
  for (const Row& r : rows) {
    const auto a = metrics::ParsePairwiseCot(testing::ReadFileOrDie(
        testing::DataPath("llm_transcripts/" + r.dir + "/" + r.file)));
    notes.Check(a.coreferential.has_value() == r.parses,
                absl::StrCat(r.dir, "/", r.file, " parse outcome"));
  }

  // Pairwise report arithmetic on synthetic counts, pushed through the CLI.
  const fs::path dir = testing::ScratchDir("acceptance_replay");
  const testing::ReplayCounts c;
  testing::WriteReplayTranscripts(dir, c);
  CliRun run = Cli({"llm-eval-parse", "--mode", "pairwise", "--transcripts",
                    dir.string(), "--gold", (dir / "gold.jsonl").string(),
                    "--json"});
  if (run.code != 0) return {Outcome::kFail, run.err};
  json j = json::parse(run.out);
  const double complete = c.tp + c.fp + c.tn + c.fn;
  notes.Check(Near(j["tcomp"].get<double>(), complete / c.total(), 1e-12),
              "TComp");
  notes.Check(Near(j["accuracy"].get<double>(),
                   static_cast<double>(c.tp + c.tn) / c.total(), 1e-12),
              "accuracy");
  notes.Check(Near(j["positive_rate"].get<double>(), (c.tp + c.fp) / complete,
                   1e-12),
              "positive rate");
  auto pct = [&](const char* k) {
    return std::round(j[k].get<double>() * 1000.0) / 10.0;
  };
  notes.Check(pct("recall") == 93.7 && pct("precision") == 57.5 &&
                  pct("f1") == 71.3 && pct("positive_rate") == 55.8 &&
                  pct("tcomp") == 99.9 && pct("accuracy") == 74.0,
              "GPT-4 zero-shot row not reproduced");
  return notes.Finish(absl::StrFormat(
      "10 transcripts as documented; replay of %d items gives TComp %.1f Acc "
      "%.1f",
      c.total(), pct("tcomp"), pct("accuracy")));
}

Verdict EcbPlusIntegration() {
  const char* dir = std::getenv("ECR_ECBPLUS_DIR");
  if (dir == nullptr || *dir == '\0') {
    return {Outcome::kSkip, "ECR_ECBPLUS_DIR not set"};
  }
  Notes notes;
  const auto start = std::chrono::steady_clock::now();
  for (Split split : {Split::kTrain, Split::kDev, Split::kTest}) {
    const std::string path =
        (fs::path(dir) / absl::StrCat(AbslSv(SplitName(split)), ".jsonl")).string();
    auto corpus = LoadCorpus(path, split);
    if (!corpus.ok()) {
      notes.Fail(std::string(corpus.status().message()));
      continue;
    }
    auto report =
        ValidateSplitStats(*corpus, *ReferenceSplitStats("ecbplus", split));
    notes.Check(report.AllPass(),
                absl::StrCat(AbslSv(SplitName(split)), " statistics mismatch"));
  }
  const fs::path out = testing::ScratchDir("acceptance_ecbplus");
  CliRun run = Cli({"pipeline", "--corpus",
                    (fs::path(dir) / "test.jsonl").string(), "--split", "test",
                    "--out", out.string(), "--json"});
  double conll = 0;
  if (run.code != 0) {
    notes.Fail(run.err);
  } else {
    conll = 100 * json::parse(run.out)["conll_f1"].get<double>();
    notes.Check(std::fabs(conll - 76.5) <= 3.0,
                absl::StrFormat("CoNLL %.1f outside 76.5 +/- 3.0", conll));
  }
  const double secs = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  notes.Check(secs < 600, absl::StrFormat("took %.0fs", secs));
  return notes.Finish(absl::StrFormat("stats match; CoNLL %.1f in %.0fs",
                                      conll, secs));
}

}  // namespace
}  // namespace ecr

int main() {
  using ecr::Outcome;
  const std::vector<std::pair<std::string, std::function<ecr::Verdict()>>>
      criteria = {
          {"metric-oracle-suite", ecr::MetricOracleSuite},
          {"worked-example", ecr::WorkedExample},
          {"augmentation-invariants", ecr::AugmentationInvariants},
          {"bias-shift", ecr::BiasShift},
          {"fuzz-ratio-suite", ecr::FuzzSuite},
          {"pipeline-determinism", ecr::PipelineDeterminism},
          {"tcomp-pairwise-report", ecr::PairwiseTcomp},
          {"ecbplus-integration", ecr::EcbPlusIntegration},
      };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    const ecr::Verdict v = check();
    const char* tag = v.outcome == Outcome::kPass   ? "PASS"
                      : v.outcome == Outcome::kSkip ? "SKIP"
                                                    : "FAIL";
    if (v.outcome == Outcome::kFail) ++failed;
    std::cout << tag << " " << name << ": " << v.detail << "\n";
  }
  return failed == 0 ? 0 : 1;
}
