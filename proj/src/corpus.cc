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

#include "ecr/corpus.h"

#include <algorithm>
#include <set>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "ecr/hashing.h"
#include "ecr/strings.h"
#include "json.hpp"

namespace ecr {
namespace {

using nlohmann::json;

absl::Status LineError(size_t line, std::string_view what) {
  return absl::InvalidArgumentError(absl::StrCat("line ", line, ": ", AbslSv(what)));
}

absl::StatusOr<std::string> StringField(const json& record,
                                        std::string_view key, size_t line) {
  auto it = record.find(key);
  if (it == record.end() || !it->is_string()) {
    return LineError(line, absl::StrCat("missing string field \"", AbslSv(key), "\""));
  }
  return it->get<std::string>();
}

absl::StatusOr<int> IntField(const json& record, std::string_view key,
                             size_t line) {
  auto it = record.find(key);
  if (it == record.end() || !it->is_number_integer()) {
    return LineError(line,
                     absl::StrCat("missing integer field \"", AbslSv(key), "\""));
  }
  return it->get<int>();
}

absl::StatusOr<Document> ParseDocument(const json& record, size_t line) {
  Document doc;
  auto id = StringField(record, "doc_id", line);
  if (!id.ok()) return id.status();
  auto topic = StringField(record, "topic_id", line);
  if (!topic.ok()) return topic.status();
  auto subtopic = StringField(record, "subtopic_id", line);
  if (!subtopic.ok()) return subtopic.status();
  doc.doc_id = *std::move(id);
  doc.topic_id = *std::move(topic);
  doc.subtopic_id = *std::move(subtopic);

  auto sentences = record.find("sentences");
  if (sentences == record.end() || !sentences->is_array()) {
    return LineError(line, "missing array field \"sentences\"");
  }
  int index = 0;
  for (const json& sentence : *sentences) {
    if (!sentence.is_array()) {
      return LineError(line, "each sentence must be an array of tokens");
    }
    Sentence rec;
    rec.index = index++;
    for (const json& token : sentence) {
      if (!token.is_string()) {
        return LineError(line, "tokens must be strings");
      }
      rec.tokens.push_back(token.get<std::string>());
    }
    if (rec.tokens.empty()) {
      return LineError(line, absl::StrCat("sentence ", rec.index,
                                          " of document ", doc.doc_id,
                                          " has no tokens"));
    }
    doc.sentences.push_back(std::move(rec));
  }
  return doc;
}

absl::StatusOr<Mention> ParseMention(const json& record, size_t line) {
  Mention m;
  auto id = StringField(record, "mention_id", line);
  if (!id.ok()) return id.status();
  auto doc = StringField(record, "doc_id", line);
  if (!doc.ok()) return doc.status();
  auto sent = IntField(record, "sent_idx", line);
  if (!sent.ok()) return sent.status();
  auto lemma = StringField(record, "head_lemma", line);
  if (!lemma.ok()) return lemma.status();
  auto cluster = StringField(record, "gold_cluster_id", line);
  if (!cluster.ok()) return cluster.status();
  auto span = record.find("span");
  if (span == record.end() || !span->is_array() || span->size() != 2 ||
      !(*span)[0].is_number_integer() || !(*span)[1].is_number_integer()) {
    return LineError(line, "\"span\" must be [start, end]");
  }
  m.mention_id = *std::move(id);
  m.doc_id = *std::move(doc);
  m.sent_idx = *sent;
  m.head_lemma = *std::move(lemma);
  m.gold_cluster_id = *std::move(cluster);
  m.span = {(*span)[0].get<int>(), (*span)[1].get<int>()};
  return m;
}

}  // namespace

absl::StatusOr<Split> ParseSplit(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "dev") return Split::kDev;
  if (name == "test") return Split::kTest;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown split \"", AbslSv(name), "\" (expected train|dev|test)"));
}

std::string_view SplitName(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kDev:
      return "dev";
    case Split::kTest:
      return "test";
  }
  return "train";
}

std::string Sentence::Text() const { return absl::StrJoin(tokens, " "); }

absl::StatusOr<Corpus> Corpus::Build(std::vector<Document> documents,
                                     std::vector<Mention> mentions,
                                     Split split) {
  Corpus corpus;
  corpus.split_ = split;
  std::vector<std::string> duplicate_docs;
  for (Document& doc : documents) {
    std::string id = doc.doc_id;
    for (size_t i = 0; i < doc.sentences.size(); ++i) {
      doc.sentences[i].index = static_cast<int>(i);
    }
    if (!corpus.documents_.emplace(id, std::move(doc)).second) {
      duplicate_docs.push_back(id);
    }
  }
  if (!duplicate_docs.empty()) {
    return absl::FailedPreconditionError(absl::StrCat(
        "duplicate doc_id: ", absl::StrJoin(duplicate_docs, ", ")));
  }

  std::vector<std::string> duplicate_mentions;
  std::vector<std::string> dangling;
  std::vector<std::string> out_of_bounds;
  for (Mention& m : mentions) {
    const Document* doc = corpus.FindDocument(m.doc_id);
    if (doc == nullptr || m.sent_idx < 0 ||
        m.sent_idx >= static_cast<int>(doc->sentences.size())) {
      dangling.push_back(m.mention_id);
      continue;
    }
    const Sentence& sentence = doc->sentences[m.sent_idx];
    if (m.span.start < 0 || m.span.start >= m.span.end ||
        m.span.end > static_cast<int>(sentence.tokens.size())) {
      out_of_bounds.push_back(m.mention_id);
      continue;
    }
    m.trigger_text = absl::StrJoin(sentence.tokens.begin() + m.span.start,
                                   sentence.tokens.begin() + m.span.end, " ");
    std::string id = m.mention_id;
    if (!corpus.mentions_.emplace(id, std::move(m)).second) {
      duplicate_mentions.push_back(id);
    }
  }
  std::vector<std::string> problems;
  if (!dangling.empty()) {
    problems.push_back(absl::StrCat("unresolved document or sentence for: ",
                                    absl::StrJoin(dangling, ", ")));
  }
  if (!out_of_bounds.empty()) {
    problems.push_back(absl::StrCat("trigger span outside sentence for: ",
                                    absl::StrJoin(out_of_bounds, ", ")));
  }
  if (!duplicate_mentions.empty()) {
    problems.push_back(absl::StrCat("duplicate mention_id: ",
                                    absl::StrJoin(duplicate_mentions, ", ")));
  }
  if (!problems.empty()) {
    return absl::FailedPreconditionError(absl::StrJoin(problems, "; "));
  }
  return corpus;
}

const Document* Corpus::FindDocument(std::string_view doc_id) const {
  auto it = documents_.find(doc_id);
  return it == documents_.end() ? nullptr : &it->second;
}

const Mention* Corpus::FindMention(std::string_view mention_id) const {
  auto it = mentions_.find(mention_id);
  return it == mentions_.end() ? nullptr : &it->second;
}

const std::string& Corpus::TopicOf(const Mention& mention) const {
  return documents_.find(mention.doc_id)->second.topic_id;
}

std::vector<std::string> Corpus::Topics() const {
  std::set<std::string> topics;
  for (const auto& [id, doc] : documents_) topics.insert(doc.topic_id);
  return {topics.begin(), topics.end()};
}

std::vector<std::string> Corpus::MentionIdsInTopic(
    std::string_view topic_id) const {
  std::vector<std::string> ids;
  for (const auto& [id, m] : mentions_) {
    if (TopicOf(m) == topic_id) ids.push_back(id);
  }
  return ids;
}

int64_t Corpus::SentenceCount() const {
  int64_t n = 0;
  for (const auto& [id, doc] : documents_) n += doc.sentences.size();
  return n;
}

absl::StatusOr<Corpus> ParseCorpus(std::string_view contents, Split split) {
  std::vector<Document> documents;
  std::vector<Mention> mentions;
  size_t line_no = 0;
  for (std::string_view line : SplitSv(contents, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    json record = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (record.is_discarded() || !record.is_object()) {
      return LineError(line_no, "not a JSON object");
    }
    auto kind = StringField(record, "kind", line_no);
    if (!kind.ok()) return kind.status();
    if (*kind == "doc") {
      auto doc = ParseDocument(record, line_no);
      if (!doc.ok()) return doc.status();
      documents.push_back(*std::move(doc));
    } else if (*kind == "mention") {
      auto m = ParseMention(record, line_no);
      if (!m.ok()) return m.status();
      mentions.push_back(*std::move(m));
    } else {
      return LineError(line_no, absl::StrCat("unknown kind \"", *kind, "\""));
    }
  }
  return Corpus::Build(std::move(documents), std::move(mentions), split);
}

absl::StatusOr<Corpus> LoadCorpus(const std::string& path, Split split) {
  auto contents = ReadFile(path);
  if (!contents.ok()) return contents.status();
  return ParseCorpus(*contents, split);
}

std::string SerializeCorpus(const Corpus& corpus) {
  std::string out;
  for (const auto& [id, doc] : corpus.documents()) {
    json sentences = json::array();
    for (const Sentence& s : doc.sentences) sentences.push_back(s.tokens);
    json record = {{"kind", "doc"},
                   {"doc_id", doc.doc_id},
                   {"topic_id", doc.topic_id},
                   {"subtopic_id", doc.subtopic_id},
                   {"sentences", std::move(sentences)}};
    absl::StrAppend(&out, record.dump(), "\n");
  }
  for (const auto& [id, m] : corpus.mentions()) {
    json record = {{"kind", "mention"},
                   {"mention_id", m.mention_id},
                   {"doc_id", m.doc_id},
                   {"sent_idx", m.sent_idx},
                   {"span", {m.span.start, m.span.end}},
                   {"head_lemma", m.head_lemma},
                   {"gold_cluster_id", m.gold_cluster_id}};
    absl::StrAppend(&out, record.dump(), "\n");
  }
  return out;
}

SplitStats ComputeSplitStats(const Corpus& corpus) {
  return {static_cast<int64_t>(corpus.documents().size()),
          corpus.SentenceCount(),
          static_cast<int64_t>(corpus.mentions().size())};
}

std::optional<SplitStats> ReferenceSplitStats(std::string_view dataset,
                                              Split split) {
  struct Row {
    std::string_view dataset;
    Split split;
    SplitStats stats;
  };
  static constexpr Row kRows[] = {
      {"ecbplus", Split::kTrain, {574, 9366, 3808}},
      {"ecbplus", Split::kDev, {196, 2837, 1245}},
      {"ecbplus", Split::kTest, {206, 3505, 1780}},
      {"fcc", Split::kTrain, {207, 7018, 1604}},
      {"fcc", Split::kDev, {117, 3648, 680}},
      {"fcc", Split::kTest, {127, 4274, 1074}},
      {"gvc", Split::kTrain, {358, 7607, 5313}},
      {"gvc", Split::kDev, {78, 1325, 977}},
      {"gvc", Split::kTest, {74, 1360, 1008}},
  };
  for (const Row& row : kRows) {
    if (row.dataset == dataset && row.split == split) return row.stats;
  }
  return std::nullopt;
}

bool ValidationReport::AllPass() const { return Failures() == 0; }

int ValidationReport::Failures() const {
  return static_cast<int>(std::count_if(
      checks.begin(), checks.end(), [](const StatCheck& c) { return !c.pass; }));
}

ValidationReport ValidateSplitStats(const Corpus& corpus,
                                    const SplitStats& expected) {
  const SplitStats actual = ComputeSplitStats(corpus);
  ValidationReport report;
  auto check = [&](std::string field, int64_t want, int64_t got) {
    report.checks.push_back({std::move(field), want, got, want == got});
  };
  check("documents", expected.documents, actual.documents);
  check("sentences", expected.sentences, actual.sentences);
  check("mentions", expected.mentions, actual.mentions);
  return report;
}

absl::StatusOr<ClusterSet> GoldClustering(
    const Corpus& corpus, std::optional<std::string_view> topic_scope) {
  if (topic_scope.has_value()) {
    const std::vector<std::string> topics = corpus.Topics();
    if (!std::binary_search(topics.begin(), topics.end(), *topic_scope)) {
      return absl::NotFoundError(
          absl::StrCat("unknown topic \"", AbslSv(*topic_scope), "\""));
    }
  }
  std::map<std::string, std::vector<std::string>> by_cluster;
  std::set<std::string> universe;
  for (const auto& [id, m] : corpus.mentions()) {
    if (topic_scope.has_value() && corpus.TopicOf(m) != *topic_scope) continue;
    by_cluster[m.gold_cluster_id].push_back(id);
    universe.insert(id);
  }
  std::vector<std::vector<std::string>> clusters;
  for (auto& [cluster_id, members] : by_cluster) {
    clusters.push_back(std::move(members));
  }
  return ClusterSet::Create(std::move(clusters), std::move(universe));
}

}  // namespace ecr
