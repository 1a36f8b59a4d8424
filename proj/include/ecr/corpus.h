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

#ifndef ECR_CORPUS_H_
#define ECR_CORPUS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "ecr/cluster_set.h"

namespace ecr {

enum class Split { kTrain, kDev, kTest };

absl::StatusOr<Split> ParseSplit(std::string_view name);
std::string_view SplitName(Split split);

// Half-open token range [start, end) within one sentence.
struct TokenSpan {
  int start = 0;
  int end = 0;
  friend bool operator==(const TokenSpan&, const TokenSpan&) = default;
};

struct Sentence {
  int index = 0;
  std::vector<std::string> tokens;

  // Tokens joined by single spaces.
  std::string Text() const;
  friend bool operator==(const Sentence&, const Sentence&) = default;
};

struct Document {
  std::string doc_id;
  std::string topic_id;
  std::string subtopic_id;  // Stored for reporting; no algorithm reads it.
  std::vector<Sentence> sentences;
  friend bool operator==(const Document&, const Document&) = default;
};

// An event trigger anchored in a document sentence.
struct Mention {
  std::string mention_id;
  std::string doc_id;
  int sent_idx = 0;
  TokenSpan span;
  std::string trigger_text;  // Derived from the span at load time.
  std::string head_lemma;
  std::string gold_cluster_id;
  friend bool operator==(const Mention&, const Mention&) = default;
};

// An immutable, fully indexed mention-annotated corpus. Every mention's
// document and sentence resolve and its span lies inside the sentence.
class Corpus {
 public:
  Corpus() = default;

  // Validates all invariants and derives each mention's trigger_text.
  static absl::StatusOr<Corpus> Build(std::vector<Document> documents,
                                      std::vector<Mention> mentions,
                                      Split split);

  const std::map<std::string, Document, std::less<>>& documents() const {
    return documents_;
  }
  const std::map<std::string, Mention, std::less<>>& mentions() const {
    return mentions_;
  }
  Split split() const { return split_; }

  const Document* FindDocument(std::string_view doc_id) const;
  const Mention* FindMention(std::string_view mention_id) const;

  // Topic of the document holding the mention; the mention must exist.
  const std::string& TopicOf(const Mention& mention) const;

  // Sorted distinct topic ids over all documents.
  std::vector<std::string> Topics() const;

  // Mention ids whose document belongs to `topic_id`, ascending.
  std::vector<std::string> MentionIdsInTopic(std::string_view topic_id) const;

  int64_t SentenceCount() const;

  friend bool operator==(const Corpus&, const Corpus&) = default;

 private:
  std::map<std::string, Document, std::less<>> documents_;
  std::map<std::string, Mention, std::less<>> mentions_;
  Split split_ = Split::kTrain;
};

// Parses the JSON-Lines corpus format:
//   {"kind":"doc","doc_id":..,"topic_id":..,"subtopic_id":..,
//    "sentences":[[tok,...],...]}
//   {"kind":"mention","mention_id":..,"doc_id":..,"sent_idx":..,
//    "span":[start,end],"head_lemma":..,"gold_cluster_id":..}
// Malformed records yield InvalidArgument naming the 1-based line number;
// dangling references and bounds violations yield FailedPrecondition listing
// the offending ids.
absl::StatusOr<Corpus> ParseCorpus(std::string_view contents, Split split);
absl::StatusOr<Corpus> LoadCorpus(const std::string& path, Split split);

// Canonical JSON-Lines rendering: documents then mentions, each in id order.
std::string SerializeCorpus(const Corpus& corpus);

struct SplitStats {
  int64_t documents = 0;
  int64_t sentences = 0;
  int64_t mentions = 0;
};

SplitStats ComputeSplitStats(const Corpus& corpus);

// Published split sizes for "ecbplus", "fcc" and "gvc".
std::optional<SplitStats> ReferenceSplitStats(std::string_view dataset,
                                              Split split);

struct StatCheck {
  std::string field;
  int64_t expected = 0;
  int64_t actual = 0;
  bool pass = false;
};

struct ValidationReport {
  std::vector<StatCheck> checks;  // documents, sentences, mentions
  bool AllPass() const;
  int Failures() const;
};

// Mismatches are reported, never raised.
ValidationReport ValidateSplitStats(const Corpus& corpus,
                                    const SplitStats& expected);

// Partition of the in-scope mentions by gold cluster id. With a topic scope,
// only that topic's mentions are included; an unknown topic is NotFound.
absl::StatusOr<ClusterSet> GoldClustering(
    const Corpus& corpus, std::optional<std::string_view> topic_scope);

}  // namespace ecr

#endif  // ECR_CORPUS_H_
