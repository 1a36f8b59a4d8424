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

#include "ecr/cli/commands.h"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "ecr/augment.h"
#include "ecr/cli/run_config.h"
#include "ecr/cluster.h"
#include "ecr/corpus.h"
#include "ecr/hashing.h"
#include "ecr/llm/client.h"
#include "ecr/metrics/coref_metrics.h"
#include "ecr/metrics/doc_template.h"
#include "ecr/metrics/pairwise.h"
#include "ecr/pairing.h"
#include "ecr/scorer.h"
#include "ecr/status_macros.h"
#include "ecr/strings.h"
#include "ecr/triggersim.h"
#include "json.hpp"

namespace ecr::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Flag values that replace config entries when given.
struct Overrides {
  std::optional<std::string> corpus, split, dataset, out_dir, scorer,
      normalizer, lea_singletons, fixtures, model, cache_dir;
  std::optional<int> w, k_train, k_infer, similarity_threshold, per_original,
      top_n, threads, batch_size;
  std::optional<double> threshold;
  std::optional<uint64_t> seed;
  std::vector<std::string> kinds;

  void Apply(RunConfig& c) const {
    auto set = [](auto& field, const auto& value) {
      if (value) field = *value;
    };
    set(c.corpus, corpus);
    set(c.split, split);
    set(c.dataset, dataset);
    set(c.out_dir, out_dir);
    set(c.scorer, scorer);
    set(c.normalizer, normalizer);
    set(c.lea_singletons, lea_singletons);
    set(c.llm.fixtures, fixtures);
    set(c.llm.model, model);
    set(c.cache_dir, cache_dir);
    set(c.w, w);
    set(c.k_train, k_train);
    set(c.k_infer, k_infer);
    set(c.similarity_threshold, similarity_threshold);
    set(c.per_original, per_original);
    set(c.top_n, top_n);
    set(c.threads, threads);
    set(c.scorer_batch_size, batch_size);
    set(c.threshold, threshold);
    set(c.seed, seed);
    if (!kinds.empty()) c.augment_kinds = kinds;
  }
};

// Stage-specific file arguments.
struct Files {
  std::vector<std::string> pairs;
  std::vector<std::string> augmented;
  std::string edges;
  std::string key;
  std::string response;
  std::string transcripts;
  std::string gold;
  std::string mode = "pairwise";
};

struct Context {
  RunConfig config;
  Files files;
  bool json_output = false;
  std::ostream* out = nullptr;
};

std::string UtcTimestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Writes artifacts under the output directory and records their digests
// for the manifest.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::string dir) : dir_(std::move(dir)) {}

  absl::Status Write(const std::string& name, std::string_view bytes) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) {
      return absl::InternalError(
          absl::StrCat("cannot create ", dir_, ": ", ec.message()));
    }
    ECR_RETURN_IF_ERROR(WriteFileAtomic(Path(name), bytes));
    outputs_[name] = Sha256Hex(bytes);
    return absl::OkStatus();
  }

  absl::Status WriteJson(const std::string& name, const json& value) {
    return Write(name, value.dump(2) + "\n");
  }

  std::string Path(const std::string& name) const {
    return (fs::path(dir_) / name).string();
  }

  // <stage>.manifest.json: config hash, input and output digests, version
  // and a timestamp. The timestamp is the only field that varies between
  // identical runs.
  absl::Status Finish(const std::string& stage, const RunConfig& config,
                      const std::vector<std::string>& inputs) {
    json in = json::object();
    for (const std::string& path : inputs) {
      ECR_ASSIGN_OR_RETURN(std::string digest, Sha256File(path));
      in[path] = digest;
    }
    json manifest{{"stage", stage},
                  {"tool_version", std::string(kToolVersion)},
                  {"config_sha256", config.Hash()},
                  {"config", config.ToJson()},
                  {"inputs", in},
                  {"outputs", outputs_},
                  {"created_at", UtcTimestamp()}};
    const std::string name = absl::StrCat(stage, ".manifest.json");
    std::error_code ec;
    fs::create_directories(dir_, ec);
    return WriteFileAtomic(Path(name), manifest.dump(2) + "\n");
  }

  const std::map<std::string, std::string>& outputs() const { return outputs_; }

 private:
  std::string dir_;
  std::map<std::string, std::string> outputs_;
};

absl::StatusOr<Corpus> LoadConfiguredCorpus(const RunConfig& config) {
  ECR_ASSIGN_OR_RETURN(Split split, ParseSplit(config.split));
  return LoadCorpus(config.corpus, split);
}

PairingOptions MakePairingOptions(const RunConfig& c) {
  PairingOptions o;
  o.k_train = c.k_train;
  o.k_infer = c.k_infer;
  o.w = c.w;
  o.scope = c.retrieval_scope == "corpus" ? RetrievalScope::kCorpusWide
                                          : RetrievalScope::kWithinTopic;
  return o;
}

absl::StatusOr<std::vector<MentionPair>> LoadPairs(const std::string& path) {
  ECR_ASSIGN_OR_RETURN(std::string text, ReadFile(path));
  return ParsePairs(text);
}

absl::StatusOr<std::vector<AugmentedPair>> LoadAugmented(
    const std::string& path) {
  ECR_ASSIGN_OR_RETURN(std::string text, ReadFile(path));
  return ParseAugmented(text);
}

absl::StatusOr<ClusterSet> LoadClusters(const std::string& path) {
  ECR_ASSIGN_OR_RETURN(std::string text, ReadFile(path));
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    return absl::InvalidArgumentError(absl::StrCat(path, " is not valid JSON"));
  }
  return ClusterSet::FromJson(j);
}

metrics::LeaSingletons LeaMode(const RunConfig& c) {
  return c.lea_singletons == "exclude" ? metrics::LeaSingletons::kExclude
                                       : metrics::LeaSingletons::kSelfLink;
}

void Emit(const Context& ctx, const json& summary, const std::string& text) {
  if (ctx.json_output) {
    *ctx.out << summary.dump() << "\n";
  } else {
    *ctx.out << text;
  }
}

// ---- stages ----------------------------------------------------------------

absl::Status Ingest(Context& ctx) {
  ECR_ASSIGN_OR_RETURN(Corpus corpus, LoadConfiguredCorpus(ctx.config));
  ECR_ASSIGN_OR_RETURN(ClusterSet gold, GoldClustering(corpus, std::nullopt));
  const SplitStats stats = ComputeSplitStats(corpus);
  json stats_json{{"split", ctx.config.split},
                  {"documents", stats.documents},
                  {"sentences", stats.sentences},
                  {"mentions", stats.mentions},
                  {"topics", corpus.Topics().size()},
                  {"gold_clusters", gold.size()}};
  ArtifactWriter w(ctx.config.out_dir);
  ECR_RETURN_IF_ERROR(w.Write("corpus.jsonl", SerializeCorpus(corpus)));
  ECR_RETURN_IF_ERROR(w.WriteJson("stats.json", stats_json));
  ECR_RETURN_IF_ERROR(w.WriteJson("gold.json", gold.ToJson()));
  ECR_RETURN_IF_ERROR(w.Finish("ingest", ctx.config, {ctx.config.corpus}));
  Emit(ctx, stats_json,
       absl::StrCat("ingested ", stats.documents, " documents, ",
                    stats.sentences, " sentences, ", stats.mentions,
                    " mentions\n"));
  return absl::OkStatus();
}

absl::Status Validate(Context& ctx) {
  ECR_ASSIGN_OR_RETURN(Corpus corpus, LoadConfiguredCorpus(ctx.config));
  const SplitStats stats = ComputeSplitStats(corpus);
  json summary{{"split", ctx.config.split},
               {"documents", stats.documents},
               {"sentences", stats.sentences},
               {"mentions", stats.mentions}};
  std::string text = absl::StrCat("corpus integrity: ok (", stats.documents,
                                  " documents, ", stats.sentences,
                                  " sentences, ", stats.mentions,
                                  " mentions)\n");
  bool pass = true;
  if (!ctx.config.dataset.empty()) {
    ECR_ASSIGN_OR_RETURN(Split split, ParseSplit(ctx.config.split));
    std::optional<SplitStats> expected =
        ReferenceSplitStats(ctx.config.dataset, split);
    if (!expected) {
      return absl::NotFoundError(absl::StrCat(
          "no reference statistics for dataset ", ctx.config.dataset));
    }
    const ValidationReport report = ValidateSplitStats(corpus, *expected);
    json checks = json::array();
    for (const StatCheck& c : report.checks) {
      checks.push_back({{"field", c.field},
                        {"expected", c.expected},
                        {"actual", c.actual},
                        {"pass", c.pass}});
      absl::StrAppend(&text, c.pass ? "PASS " : "FAIL ", c.field,
                      ": expected ", c.expected, ", got ", c.actual, "\n");
    }
    summary["dataset"] = ctx.config.dataset;
    summary["checks"] = checks;
    pass = report.AllPass();
  }
  summary["pass"] = pass;
  if (!ctx.config.out_dir.empty()) {
    ArtifactWriter w(ctx.config.out_dir);
    ECR_RETURN_IF_ERROR(w.WriteJson("validation.json", summary));
    ECR_RETURN_IF_ERROR(w.Finish("validate", ctx.config, {ctx.config.corpus}));
  }
  Emit(ctx, summary, text);
  if (!pass) {
    return absl::FailedPreconditionError(absl::StrCat(
        "split statistics differ from the ", ctx.config.dataset, " reference"));
  }
  return absl::OkStatus();
}

absl::Status BuildPairs(Context& ctx, ArtifactWriter& w, const Corpus& corpus) {
  TokenOverlapSimilarity sim(corpus, ctx.config.w);
  ECR_ASSIGN_OR_RETURN(PairDataset dataset,
                       BuildPairDataset(corpus, MakePairingOptions(ctx.config),
                                        sim));
  ECR_RETURN_IF_ERROR(w.Write("pairs.jsonl", SerializePairs(dataset.pairs)));
  json meta{{"pairs", dataset.pairs.size()},
            {"k_train", dataset.k_train},
            {"k_infer", dataset.k_infer},
            {"short_anchors", dataset.short_anchors}};
  ECR_RETURN_IF_ERROR(w.WriteJson("pairs.meta.json", meta));
  return absl::OkStatus();
}

absl::Status BuildPairsCommand(Context& ctx) {
  ECR_ASSIGN_OR_RETURN(Corpus corpus, LoadConfiguredCorpus(ctx.config));
  ArtifactWriter w(ctx.config.out_dir);
  ECR_RETURN_IF_ERROR(BuildPairs(ctx, w, corpus));
  ECR_RETURN_IF_ERROR(w.Finish("build-pairs", ctx.config, {ctx.config.corpus}));
  Emit(ctx, json{{"pairs", w.Path("pairs.jsonl")}},
       absl::StrCat("wrote ", w.Path("pairs.jsonl"), "\n"));
  return absl::OkStatus();
}

absl::Status AnalyzeBias(Context& ctx) {
  std::vector<MentionPair> pairs;
  std::vector<std::string> inputs;
  for (const std::string& path : ctx.files.pairs) {
    ECR_ASSIGN_OR_RETURN(std::vector<MentionPair> p, LoadPairs(path));
    pairs.insert(pairs.end(), p.begin(), p.end());
    inputs.push_back(path);
  }
  for (const std::string& path : ctx.files.augmented) {
    ECR_ASSIGN_OR_RETURN(std::vector<AugmentedPair> augs, LoadAugmented(path));
    for (AugmentedPair& a : augs) pairs.push_back(std::move(a.pair));
    inputs.push_back(path);
  }
  HeadLemmaNormalizer lemma;
  SurfaceNormalizer surface;
  const TriggerNormalizer& normalizer =
      ctx.config.normalizer == "surface"
          ? static_cast<const TriggerNormalizer&>(surface)
          : static_cast<const TriggerNormalizer&>(lemma);
  ECR_ASSIGN_OR_RETURN(
      BiasHistogram hist,
      ComputeBiasHistogram(pairs, normalizer, ctx.config.similarity_threshold));
  if (!ctx.config.out_dir.empty()) {
    ArtifactWriter w(ctx.config.out_dir);
    ECR_RETURN_IF_ERROR(w.WriteJson("bias.json", hist.ToJson()));
    ECR_RETURN_IF_ERROR(w.Write("bias.csv", hist.ToCsv()));
    ECR_RETURN_IF_ERROR(w.Finish("analyze-bias", ctx.config, inputs));
  }
  Emit(ctx, hist.ToJson(), hist.ToCsv());
  return absl::OkStatus();
}

absl::StatusOr<std::unique_ptr<llm::LlmClient>> MakeLlmClient(
    const RunConfig& c) {
  std::unique_ptr<llm::ChatBackend> backend;
  if (c.llm.provider == "mock") {
    ECR_ASSIGN_OR_RETURN(backend, llm::MockBackend::FromFile(c.llm.fixtures));
  } else {
    llm::HttpBackendOptions http;
    http.base_url = c.llm.base_url;
    ECR_ASSIGN_OR_RETURN(backend, llm::OpenAiBackend::Create(http));
  }
  llm::ClientOptions options;
  options.cache_dir = c.cache_dir;
  options.max_attempts = c.llm.max_attempts;
  options.max_in_flight = c.llm.max_in_flight;
  options.max_requests_per_second = c.llm.max_requests_per_second;
  return std::make_unique<llm::LlmClient>(std::move(backend), options);
}

// Generates every configured kind for the eligible pairs and mixes each
// into the originals.
absl::Status Augment(Context& ctx, ArtifactWriter& w,
                     const std::vector<MentionPair>& pairs, json& summary) {
  ECR_ASSIGN_OR_RETURN(std::unique_ptr<llm::LlmClient> client,
                       MakeLlmClient(ctx.config));
  ECR_ASSIGN_OR_RETURN(
      AugmentationPlan plan,
      AugmentationPlan::Create(ctx.config.per_original, ctx.config.top_n,
                               ctx.config.seed));
  std::vector<MentionPair> eligible;
  for (const MentionPair& p : pairs) {
    if (IsEligible(p, plan)) eligible.push_back(p);
  }
  PairDataset ori;
  ori.pairs = pairs;
  ori.k_train = ctx.config.k_train;
  ori.k_infer = ctx.config.k_infer;
  AugmentOptions options;
  options.model = ctx.config.llm.model;
  options.temperature = ctx.config.llm.temperature;
  for (const std::string& name : ctx.config.augment_kinds) {
    ECR_ASSIGN_OR_RETURN(AugmentKind kind, ParseAugmentKind(name));
    ECR_ASSIGN_OR_RETURN(GenerationResult gen,
                         GenerateForDataset(kind, eligible, *client, options,
                                            ctx.config.threads));
    ECR_ASSIGN_OR_RETURN(MixResult mix, MixDataset(ori, gen.pairs, plan));
    ECR_RETURN_IF_ERROR(w.Write(absl::StrCat("aug_", name, ".jsonl"),
                                SerializeAugmented(gen.pairs)));
    ECR_RETURN_IF_ERROR(w.Write(absl::StrCat("mixed_", name, ".jsonl"),
                                SerializePairs(mix.dataset.pairs)));
    summary[name] = json{{"eligible_sources", eligible.size()},
                         {"generated", gen.pairs.size()},
                         {"chosen", mix.chosen.size()},
                         {"mixed_total", mix.dataset.pairs.size()},
                         {"candidates", gen.stats.candidates},
                         {"dropped_parse", gen.stats.dropped_parse},
                         {"dropped_constraint", gen.stats.dropped_constraint},
                         {"warnings", gen.stats.warnings}};
  }
  return absl::OkStatus();
}

absl::Status AugmentCommand(Context& ctx) {
  ECR_ASSIGN_OR_RETURN(std::vector<MentionPair> pairs,
                       LoadPairs(ctx.files.pairs.front()));
  ArtifactWriter w(ctx.config.out_dir);
  json summary = json::object();
  ECR_RETURN_IF_ERROR(Augment(ctx, w, pairs, summary));
  ECR_RETURN_IF_ERROR(w.WriteJson("augment.stats.json", summary));
  std::vector<std::string> inputs = ctx.files.pairs;
  if (ctx.config.llm.provider == "mock") inputs.push_back(ctx.config.llm.fixtures);
  ECR_RETURN_IF_ERROR(w.Finish("augment", ctx.config, inputs));
  std::string text;
  for (const auto& [kind, s] : summary.items()) {
    absl::StrAppend(&text, kind, ": ", s["generated"].get<size_t>(),
                    " generated, ", s["chosen"].get<size_t>(), " mixed in\n");
  }
  Emit(ctx, summary, text);
  return absl::OkStatus();
}

absl::StatusOr<std::vector<ScoredEdge>> ScorePairs(
    const RunConfig& config, const std::vector<MentionPair>& pairs) {
  std::vector<ScoredEdge> edges;
  edges.reserve(pairs.size());
  if (config.scorer == "lemma") {
    for (const MentionPair& p : pairs) {
      edges.push_back({p.pair_id, p.first.mention_id, p.second.mention_id,
                       LemmaBaselineScore(p).score});
    }
    return edges;
  }
  if (pairs.empty()) return edges;
  std::vector<ScoreRequest> requests;
  requests.reserve(pairs.size());
  for (const MentionPair& p : pairs) requests.push_back(MakeScoreRequest(p));
  ExternalScorerOptions options;
  options.endpoint = config.scorer;
  options.batch_size = static_cast<size_t>(config.scorer_batch_size);
  options.max_in_flight = config.scorer_in_flight;
  ECR_ASSIGN_OR_RETURN(auto results, ExternalScoreBatch(requests, options));
  for (size_t i = 0; i < pairs.size(); ++i) {
    if (!results[i].ok()) return results[i].status();
    edges.push_back({pairs[i].pair_id, pairs[i].first.mention_id,
                     pairs[i].second.mention_id, results[i]->score});
  }
  return edges;
}

absl::Status ScoreCommand(Context& ctx) {
  ECR_ASSIGN_OR_RETURN(std::vector<MentionPair> pairs,
                       LoadPairs(ctx.files.pairs.front()));
  ECR_ASSIGN_OR_RETURN(std::vector<ScoredEdge> edges,
                       ScorePairs(ctx.config, pairs));
  ArtifactWriter w(ctx.config.out_dir);
  ECR_RETURN_IF_ERROR(w.Write("edges.jsonl", SerializeEdges(edges)));
  ECR_RETURN_IF_ERROR(w.Finish("score", ctx.config, ctx.files.pairs));
  Emit(ctx, json{{"edges", edges.size()}},
       absl::StrCat("scored ", edges.size(), " pairs\n"));
  return absl::OkStatus();
}

absl::StatusOr<ClusterSet> Cluster(const RunConfig& config,
                                   const Corpus& corpus,
                                   const std::vector<ScoredEdge>& edges) {
  ECR_ASSIGN_OR_RETURN(std::vector<TopicEdges> topics,
                       GroupEdgesByTopic(corpus, edges));
  return ClusterWithinTopics(topics, config.threshold, config.threads);
}

absl::Status ClusterCommand(Context& ctx) {
  ECR_ASSIGN_OR_RETURN(Corpus corpus, LoadConfiguredCorpus(ctx.config));
  ECR_ASSIGN_OR_RETURN(std::string text, ReadFile(ctx.files.edges));
  ECR_ASSIGN_OR_RETURN(std::vector<ScoredEdge> edges, ParseEdges(text));
  ECR_ASSIGN_OR_RETURN(ClusterSet response, Cluster(ctx.config, corpus, edges));
  ArtifactWriter w(ctx.config.out_dir);
  ECR_RETURN_IF_ERROR(w.WriteJson("response.json", response.ToJson()));
  ECR_RETURN_IF_ERROR(
      w.Finish("cluster", ctx.config, {ctx.config.corpus, ctx.files.edges}));
  Emit(ctx, json{{"clusters", response.size()}},
       absl::StrCat(response.size(), " clusters over ",
                    response.universe().size(), " mentions\n"));
  return absl::OkStatus();
}

absl::Status EvaluateCommand(Context& ctx) {
  ClusterSet key;
  std::vector<std::string> inputs;
  if (!ctx.files.key.empty()) {
    ECR_ASSIGN_OR_RETURN(key, LoadClusters(ctx.files.key));
    inputs.push_back(ctx.files.key);
  } else {
    ECR_ASSIGN_OR_RETURN(Corpus corpus, LoadConfiguredCorpus(ctx.config));
    ECR_ASSIGN_OR_RETURN(key, GoldClustering(corpus, std::nullopt));
    inputs.push_back(ctx.config.corpus);
  }
  ECR_ASSIGN_OR_RETURN(ClusterSet response, LoadClusters(ctx.files.response));
  inputs.push_back(ctx.files.response);
  ECR_ASSIGN_OR_RETURN(metrics::MetricReport report,
                       metrics::Conll(key, response, LeaMode(ctx.config)));
  if (!ctx.config.out_dir.empty()) {
    ArtifactWriter w(ctx.config.out_dir);
    ECR_RETURN_IF_ERROR(w.WriteJson("report.json", report.ToJson()));
    ECR_RETURN_IF_ERROR(w.Finish("evaluate", ctx.config, inputs));
  }
  Emit(ctx, report.ToJson(), report.ToTable());
  return absl::OkStatus();
}

// Transcript file for an id: <dir>/<id>.txt
std::string TranscriptPath(const std::string& dir, std::string_view id) {
  return (fs::path(dir) / absl::StrCat(AbslSv(id), ".txt")).string();
}

absl::Status ParsePairwiseTranscripts(Context& ctx) {
  ECR_ASSIGN_OR_RETURN(std::string gold_text, ReadFile(ctx.files.gold));
  std::map<std::string, bool, std::less<>> gold;
  std::vector<std::string> order;
  int line_no = 0;
  for (std::string_view line : SplitSv(gold_text, '\n')) {
    ++line_no;
    if (StripWhitespace(line).empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("pair_id") ||
        !j["pair_id"].is_string() || !j.contains("label") ||
        !j["label"].is_string()) {
      return absl::InvalidArgumentError(absl::StrCat(
          ctx.files.gold, ":", line_no,
          ": expected {\"pair_id\": str, \"label\": \"coref\"|\"not_coref\"}"));
    }
    ECR_ASSIGN_OR_RETURN(PairLabel label,
                         ParsePairLabel(j["label"].get<std::string>()));
    const std::string id = j["pair_id"].get<std::string>();
    if (!gold.emplace(id, label == PairLabel::kCoref).second) {
      return absl::InvalidArgumentError(
          absl::StrCat(ctx.files.gold, ":", line_no, ": duplicate pair ", id));
    }
    order.push_back(id);
  }
  std::vector<metrics::PairwisePrediction> predictions;
  json items = json::array();
  for (const std::string& id : order) {
    ECR_ASSIGN_OR_RETURN(std::string raw,
                         ReadFile(TranscriptPath(ctx.files.transcripts, id)));
    const metrics::CotAnswer answer = metrics::ParsePairwiseCot(raw);
    predictions.push_back({id, answer.coreferential});
    json item{{"pair_id", id}, {"complete", answer.coreferential.has_value()}};
    if (answer.coreferential) item["coreferential"] = *answer.coreferential;
    if (answer.score) item["score"] = *answer.score;
    items.push_back(item);
  }
  ECR_ASSIGN_OR_RETURN(metrics::PairwiseReport report,
                       metrics::ComputePairwiseReport(gold, predictions));
  json summary = report.ToJson();
  if (!ctx.config.out_dir.empty()) {
    ArtifactWriter w(ctx.config.out_dir);
    ECR_RETURN_IF_ERROR(w.WriteJson("pairwise_report.json", summary));
    ECR_RETURN_IF_ERROR(w.WriteJson("pairwise_items.json", items));
    ECR_RETURN_IF_ERROR(w.Finish("llm-eval-parse", ctx.config,
                                 {ctx.files.gold}));
  }
  Emit(ctx, summary,
       absl::StrFormat("R %.1f  P %.1f  F1 %.1f  PR %.1f  TComp %.1f  Acc "
                       "%.1f  (%d/%d complete)\n",
                       100 * report.recall, 100 * report.precision,
                       100 * report.f1, 100 * report.positive_rate,
                       100 * report.tcomp, 100 * report.accuracy,
                       report.n_complete, report.n_total));
  return absl::OkStatus();
}

absl::Status ParseDocTemplateTranscripts(Context& ctx) {
  ECR_ASSIGN_OR_RETURN(Corpus corpus, LoadConfiguredCorpus(ctx.config));
  std::vector<fs::path> files;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(ctx.files.transcripts, ec)) {
    if (entry.path().extension() == ".txt") files.push_back(entry.path());
  }
  if (ec) {
    return absl::NotFoundError(
        absl::StrCat("cannot list ", ctx.files.transcripts, ": ", ec.message()));
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    return absl::NotFoundError(
        absl::StrCat("no .txt transcripts in ", ctx.files.transcripts));
  }
  const std::vector<std::string> topics = corpus.Topics();
  std::vector<std::vector<std::string>> key_clusters;
  ClusterSet response;
  metrics::LlmErrorTaxonomy errors;
  json inputs = json::array();
  std::set<std::string> covered_docs;
  for (const fs::path& file : files) {
    const std::string id = file.stem().string();
    std::vector<std::string> doc_ids;
    if (std::find(topics.begin(), topics.end(), id) != topics.end()) {
      for (const auto& [doc_id, doc] : corpus.documents()) {
        if (doc.topic_id == id) doc_ids.push_back(doc_id);
      }
    } else if (corpus.FindDocument(id) != nullptr) {
      doc_ids.push_back(id);
    } else {
      return absl::NotFoundError(absl::StrCat(
          "transcript ", file.string(), " names no topic or document"));
    }
    for (const std::string& d : doc_ids) {
      if (!covered_docs.insert(d).second) {
        return absl::InvalidArgumentError(
            absl::StrCat("document ", d, " is covered by two transcripts"));
      }
    }
    ECR_ASSIGN_OR_RETURN(metrics::DocTemplateInput input,
                         metrics::BuildDocTemplateInput(corpus, id, doc_ids));
    ECR_ASSIGN_OR_RETURN(std::string raw, ReadFile(file.string()));
    std::map<std::string, std::vector<std::string>> gold_by_cluster;
    for (const metrics::GoldSpan& g : input.gold) {
      gold_by_cluster[g.cluster_id].push_back(g.mention_id);
    }
    for (auto& [cluster, members] : gold_by_cluster) {
      key_clusters.push_back(std::move(members));
    }
    absl::StatusOr<metrics::DocTemplateAnnotation> ann =
        metrics::ParseDocTemplate(input, raw);
    json entry{{"input_id", id}, {"parsed", ann.ok()}};
    metrics::DocTemplateAnnotation annotation;
    if (ann.ok()) {
      annotation = *std::move(ann);
      entry["errors"] = annotation.errors.ToJson();
      errors += annotation.errors;
    } else {
      // Unreadable: every gold mention stays a response singleton.
      entry["error"] = std::string(StdSv(ann.status().message()));
      for (const metrics::GoldSpan& g : input.gold) {
        annotation.mentions.push_back({g.mention_id, std::nullopt});
      }
    }
    inputs.push_back(entry);
    ECR_ASSIGN_OR_RETURN(ClusterSet part,
                         metrics::ResponseClustering(input, annotation));
    ECR_ASSIGN_OR_RETURN(response, response.Union(part));
  }
  ECR_ASSIGN_OR_RETURN(ClusterSet key,
                       ClusterSet::FromClusters(std::move(key_clusters)));
  ECR_ASSIGN_OR_RETURN(metrics::MetricReport report,
                       metrics::Conll(key, response, LeaMode(ctx.config)));
  size_t parsed = 0;
  for (const json& e : inputs) parsed += e["parsed"].get<bool>() ? 1 : 0;
  json summary{{"metrics", report.ToJson()},
               {"errors", errors.ToJson()},
               {"inputs", inputs},
               {"tcomp", static_cast<double>(parsed) /
                             static_cast<double>(inputs.size())}};
  if (!ctx.config.out_dir.empty()) {
    ArtifactWriter w(ctx.config.out_dir);
    ECR_RETURN_IF_ERROR(w.WriteJson("doc_template_report.json", summary));
    ECR_RETURN_IF_ERROR(w.WriteJson("doc_template_response.json",
                                    response.ToJson()));
    ECR_RETURN_IF_ERROR(
        w.Finish("llm-eval-parse", ctx.config, {ctx.config.corpus}));
  }
  Emit(ctx, summary,
       absl::StrCat(report.ToTable(), "missing (type 1): ",
                    errors.missing_type1, "  missing (type 2): ",
                    errors.missing_type2, "  redundant: ", errors.redundant,
                    "  wrong: ", errors.wrong_prediction, "\n"));
  return absl::OkStatus();
}

absl::Status LlmEvalParse(Context& ctx) {
  if (ctx.files.mode == "pairwise") return ParsePairwiseTranscripts(ctx);
  return ParseDocTemplateTranscripts(ctx);
}

absl::Status Pipeline(Context& ctx) {
  const RunConfig& c = ctx.config;
  ECR_ASSIGN_OR_RETURN(Corpus corpus, LoadConfiguredCorpus(c));
  ArtifactWriter w(c.out_dir);
  ECR_ASSIGN_OR_RETURN(ClusterSet gold, GoldClustering(corpus, std::nullopt));
  ECR_RETURN_IF_ERROR(w.Write("corpus.jsonl", SerializeCorpus(corpus)));
  ECR_RETURN_IF_ERROR(w.WriteJson("gold.json", gold.ToJson()));
  ECR_RETURN_IF_ERROR(BuildPairs(ctx, w, corpus));
  ECR_ASSIGN_OR_RETURN(std::vector<MentionPair> pairs,
                       LoadPairs(w.Path("pairs.jsonl")));
  std::vector<std::string> inputs = {c.corpus};
  if (!c.augment_kinds.empty()) {
    json summary = json::object();
    ECR_RETURN_IF_ERROR(Augment(ctx, w, pairs, summary));
    ECR_RETURN_IF_ERROR(w.WriteJson("augment.stats.json", summary));
    if (c.llm.provider == "mock") inputs.push_back(c.llm.fixtures);
  }
  ECR_ASSIGN_OR_RETURN(std::vector<ScoredEdge> edges, ScorePairs(c, pairs));
  ECR_RETURN_IF_ERROR(w.Write("edges.jsonl", SerializeEdges(edges)));
  ECR_ASSIGN_OR_RETURN(ClusterSet response, Cluster(c, corpus, edges));
  ECR_RETURN_IF_ERROR(w.WriteJson("response.json", response.ToJson()));
  ECR_ASSIGN_OR_RETURN(metrics::MetricReport report,
                       metrics::Conll(gold, response, LeaMode(c)));
  ECR_RETURN_IF_ERROR(w.WriteJson("report.json", report.ToJson()));
  ECR_RETURN_IF_ERROR(w.Finish("pipeline", c, inputs));
  Emit(ctx, report.ToJson(), report.ToTable());
  return absl::OkStatus();
}

// ---- argument handling -----------------------------------------------------

absl::Status RequireFile(std::string_view what, const std::string& path) {
  if (path.empty()) {
    return absl::InvalidArgumentError(absl::StrCat(AbslSv(what), " is required"));
  }
  std::error_code ec;
  if (!fs::exists(path, ec)) {
    return absl::NotFoundError(
        absl::StrCat(AbslSv(what), " not found: ", path));
  }
  return absl::OkStatus();
}

absl::Status RequireOutDir(const RunConfig& c) {
  if (c.out_dir.empty()) {
    return absl::InvalidArgumentError("an output directory (--out) is required");
  }
  return absl::OkStatus();
}

absl::Status RequireLlm(const RunConfig& c) {
  if (c.augment_kinds.empty()) {
    return absl::InvalidArgumentError(
        "no augmentation kind given (--kind or augment_kinds)");
  }
  if (c.llm.provider == "mock") return RequireFile("llm.fixtures", c.llm.fixtures);
  return absl::OkStatus();
}

// Config-level checks for one subcommand: everything that can be known
// before any data is read.
absl::Status CheckStage(const std::string& stage, const Context& ctx) {
  const RunConfig& c = ctx.config;
  ECR_RETURN_IF_ERROR(c.Validate());
  const Files& f = ctx.files;
  if (stage == "ingest" || stage == "build-pairs" || stage == "pipeline") {
    ECR_RETURN_IF_ERROR(RequireFile("corpus", c.corpus));
    ECR_RETURN_IF_ERROR(RequireOutDir(c));
    if (stage == "pipeline" && !c.augment_kinds.empty()) {
      ECR_RETURN_IF_ERROR(RequireLlm(c));
    }
  } else if (stage == "validate") {
    ECR_RETURN_IF_ERROR(RequireFile("corpus", c.corpus));
  } else if (stage == "analyze-bias") {
    if (f.pairs.empty() && f.augmented.empty()) {
      return absl::InvalidArgumentError("--pairs or --augmented is required");
    }
    for (const std::string& p : f.pairs) ECR_RETURN_IF_ERROR(RequireFile("pairs", p));
    for (const std::string& p : f.augmented) {
      ECR_RETURN_IF_ERROR(RequireFile("augmented", p));
    }
  } else if (stage == "augment") {
    if (f.pairs.size() != 1) {
      return absl::InvalidArgumentError("exactly one --pairs file is required");
    }
    ECR_RETURN_IF_ERROR(RequireFile("pairs", f.pairs.front()));
    ECR_RETURN_IF_ERROR(RequireOutDir(c));
    ECR_RETURN_IF_ERROR(RequireLlm(c));
  } else if (stage == "score") {
    if (f.pairs.size() != 1) {
      return absl::InvalidArgumentError("exactly one --pairs file is required");
    }
    ECR_RETURN_IF_ERROR(RequireFile("pairs", f.pairs.front()));
    ECR_RETURN_IF_ERROR(RequireOutDir(c));
  } else if (stage == "cluster") {
    ECR_RETURN_IF_ERROR(RequireFile("corpus", c.corpus));
    ECR_RETURN_IF_ERROR(RequireFile("edges", f.edges));
    ECR_RETURN_IF_ERROR(RequireOutDir(c));
  } else if (stage == "evaluate") {
    if (f.key.empty()) {
      ECR_RETURN_IF_ERROR(RequireFile("--key or corpus", c.corpus));
    } else {
      ECR_RETURN_IF_ERROR(RequireFile("key", f.key));
    }
    ECR_RETURN_IF_ERROR(RequireFile("response", f.response));
  } else if (stage == "llm-eval-parse") {
    ECR_RETURN_IF_ERROR(RequireFile("transcripts", f.transcripts));
    if (f.mode == "pairwise") {
      ECR_RETURN_IF_ERROR(RequireFile("gold", f.gold));
    } else if (f.mode == "doc-template") {
      ECR_RETURN_IF_ERROR(RequireFile("corpus", c.corpus));
    } else {
      return absl::InvalidArgumentError(
          "--mode must be \"pairwise\" or \"doc-template\"");
    }
  }
  return absl::OkStatus();
}

int Fail(int code, const absl::Status& status, bool json_output,
         std::ostream& err) {
  if (json_output) {
    err << json{{"error",
                 {{"exit_code", code},
                  {"status", absl::StatusCodeToString(status.code())},
                  {"message", std::string(StdSv(status.message()))}}}}
               .dump()
        << "\n";
  } else {
    err << "error: " << StdSv(status.message()) << "\n";
  }
  return code;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Counterfactual data augmentation toolkit for cross-document "
               "event coreference"};
  app.name("ecrcad");
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  bool json_output = false;
  Overrides ov;
  Files files;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--seed", ov.seed, "Random seed");
  app.add_flag("--json", json_output, "Machine-readable output and errors");
  app.add_option("--cache-dir", ov.cache_dir, "LLM response cache directory");

  auto corpus_opts = [&](CLI::App* sub) {
    sub->add_option("--corpus", ov.corpus, "Corpus JSON-Lines file");
    sub->add_option("--split", ov.split, "train, dev or test");
  };
  auto out_opt = [&](CLI::App* sub) {
    sub->add_option("--out", ov.out_dir, "Output directory");
  };

  CLI::App* ingest = app.add_subcommand("ingest", "Load and canonicalize a corpus");
  corpus_opts(ingest);
  out_opt(ingest);

  CLI::App* validate =
      app.add_subcommand("validate", "Check corpus integrity and split sizes");
  corpus_opts(validate);
  out_opt(validate);
  validate->add_option("--dataset", ov.dataset, "ecbplus, fcc or gvc");

  CLI::App* bias = app.add_subcommand(
      "analyze-bias", "Trigger-similarity histogram over pair datasets");
  bias->add_option("--pairs", files.pairs, "Pair JSON-Lines files");
  bias->add_option("--augmented", files.augmented,
                   "Augmented pair JSON-Lines files");
  bias->add_option("--normalizer", ov.normalizer, "lemma or surface");
  bias->add_option("--similarity-threshold", ov.similarity_threshold,
                   "Fuzz ratio threshold");
  out_opt(bias);

  CLI::App* pairs = app.add_subcommand("build-pairs", "Build mention pairs");
  corpus_opts(pairs);
  out_opt(pairs);
  pairs->add_option("--w", ov.w, "Discourse window radius");
  pairs->add_option("--k-train", ov.k_train, "Neighbors per anchor (train)");
  pairs->add_option("--k-infer", ov.k_infer, "Neighbors per anchor (dev/test)");

  CLI::App* augment = app.add_subcommand("augment", "Generate augmented pairs");
  augment->add_option("--pairs", files.pairs, "Pair JSON-Lines file");
  augment->add_option("--kind", ov.kinds, "cad, tia, cia or tad");
  augment->add_option("--fixtures", ov.fixtures, "Mock LLM fixtures");
  augment->add_option("--model", ov.model, "LLM model name");
  augment->add_option("--per-original", ov.per_original,
                      "Augmentations kept per original");
  augment->add_option("--top-n", ov.top_n, "Eligible neighbor ranks");
  augment->add_option("--threads", ov.threads, "Worker threads");
  out_opt(augment);

  CLI::App* score = app.add_subcommand("score", "Score mention pairs");
  score->add_option("--pairs", files.pairs, "Pair JSON-Lines file");
  score->add_option("--scorer", ov.scorer, "lemma or http(s)://host:port");
  score->add_option("--batch-size", ov.batch_size, "Requests per POST");
  out_opt(score);

  CLI::App* cluster = app.add_subcommand("cluster", "Greedy clustering");
  corpus_opts(cluster);
  cluster->add_option("--edges", files.edges, "Scored edges JSON-Lines");
  cluster->add_option("--threshold", ov.threshold, "Merge threshold");
  cluster->add_option("--threads", ov.threads, "Worker threads");
  out_opt(cluster);

  CLI::App* evaluate = app.add_subcommand("evaluate", "Coreference metrics");
  evaluate->add_option("--key", files.key, "Key ClusterSet JSON");
  corpus_opts(evaluate);
  evaluate->add_option("--response", files.response, "Response ClusterSet JSON");
  evaluate->add_option("--lea-singletons", ov.lea_singletons,
                       "self-link or exclude");
  out_opt(evaluate);

  CLI::App* parse = app.add_subcommand(
      "llm-eval-parse", "Parse LLM evaluation transcripts");
  parse->add_option("--mode", files.mode, "pairwise or doc-template");
  parse->add_option("--transcripts", files.transcripts,
                    "Directory of <id>.txt responses");
  parse->add_option("--gold", files.gold, "Pairwise gold labels JSON-Lines");
  corpus_opts(parse);
  parse->add_option("--lea-singletons", ov.lea_singletons,
                    "self-link or exclude");
  out_opt(parse);

  CLI::App* pipeline =
      app.add_subcommand("pipeline", "build-pairs, score, cluster, evaluate");
  corpus_opts(pipeline);
  out_opt(pipeline);
  pipeline->add_option("--scorer", ov.scorer, "lemma or http(s)://host:port");
  pipeline->add_option("--threshold", ov.threshold, "Merge threshold");
  pipeline->add_option("--kind", ov.kinds, "Augmentation kinds to generate");
  pipeline->add_option("--fixtures", ov.fixtures, "Mock LLM fixtures");
  pipeline->add_option("--w", ov.w, "Discourse window radius");
  pipeline->add_option("--threads", ov.threads, "Worker threads");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    return Fail(kExitConfigError, absl::InvalidArgumentError(e.what()),
                json_output, err);
  }

  Context ctx;
  ctx.json_output = json_output;
  ctx.out = &out;
  if (!config_path.empty()) {
    std::error_code ec;
    if (!fs::exists(config_path, ec)) {
      return Fail(kExitConfigError,
                  absl::NotFoundError(
                      absl::StrCat("config file not found: ", config_path)),
                  json_output, err);
    }
    absl::StatusOr<RunConfig> loaded = LoadRunConfig(config_path);
    if (!loaded.ok()) {
      return Fail(kExitConfigError, loaded.status(), json_output, err);
    }
    ctx.config = *std::move(loaded);
  }
  ov.Apply(ctx.config);
  ctx.files = files;

  const std::string stage = app.get_subcommands().front()->get_name();
  if (absl::Status st = CheckStage(stage, ctx); !st.ok()) {
    return Fail(kExitConfigError, st, json_output, err);
  }

  absl::Status status;
  if (stage == "ingest") {
    status = Ingest(ctx);
  } else if (stage == "validate") {
    status = Validate(ctx);
  } else if (stage == "analyze-bias") {
    status = AnalyzeBias(ctx);
  } else if (stage == "build-pairs") {
    status = BuildPairsCommand(ctx);
  } else if (stage == "augment") {
    status = AugmentCommand(ctx);
  } else if (stage == "score") {
    status = ScoreCommand(ctx);
  } else if (stage == "cluster") {
    status = ClusterCommand(ctx);
  } else if (stage == "evaluate") {
    status = EvaluateCommand(ctx);
  } else if (stage == "llm-eval-parse") {
    status = LlmEvalParse(ctx);
  } else {
    status = Pipeline(ctx);
  }
  if (!status.ok()) return Fail(kExitDataError, status, json_output, err);
  return kExitOk;
}

}  // namespace ecr::cli
