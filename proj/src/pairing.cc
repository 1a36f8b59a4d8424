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

#include "ecr/pairing.h"
#include "ecr/strings.h"

#include <algorithm>
#include <utility>

#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"

namespace ecr {
namespace {

using nlohmann::json;

absl::StatusOr<std::vector<std::string>> StringList(const json& j,
                                                    std::string_view key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_array()) {
    return absl::InvalidArgumentError(
        absl::StrCat("missing array \"", AbslSv(key), "\""));
  }
  std::vector<std::string> out;
  for (const json& s : *it) {
    if (!s.is_string()) {
      return absl::InvalidArgumentError(
          absl::StrCat("\"", AbslSv(key), "\" must hold strings"));
    }
    out.push_back(s.get<std::string>());
  }
  return out;
}

constexpr std::string_view kStopwords[] = {
    "a",       "about",  "above",  "after",   "again",  "against", "all",
    "also",    "am",     "an",     "and",     "any",    "are",     "as",
    "at",      "be",     "been",   "before",  "being",  "below",   "between",
    "both",    "but",    "by",     "can",     "could",  "did",     "do",
    "does",    "doing",  "down",   "during",  "each",   "few",     "for",
    "from",    "further", "had",   "has",     "have",   "having",  "he",
    "her",     "here",   "hers",   "herself", "him",    "himself", "his",
    "how",     "i",      "if",     "in",      "into",   "is",      "it",
    "its",     "itself", "just",   "me",      "more",   "most",    "my",
    "myself",  "no",     "nor",    "not",     "now",    "of",      "off",
    "on",      "once",   "only",   "or",      "other",  "our",     "ours",
    "out",     "over",   "own",    "said",    "same",   "she",     "should",
    "so",      "some",   "such",   "than",    "that",   "the",     "their",
    "theirs",  "them",   "then",   "there",   "these",  "they",    "this",
    "those",   "through", "to",    "too",     "under",  "until",   "up",
    "very",    "was",    "we",     "were",    "what",   "when",    "where",
    "which",   "while",  "who",    "whom",    "why",    "will",    "with",
    "would",   "you",    "your",   "yours",
};

}  // namespace

std::string_view DiscourseWindow::trigger() const {
  return std::string_view(center).substr(trigger_begin,
                                         trigger_end - trigger_begin);
}

std::string DiscourseWindow::Text() const {
  std::vector<absl::string_view> parts;
  for (const std::string& s : prefix) parts.push_back(s);
  parts.push_back(center);
  for (const std::string& s : suffix) parts.push_back(s);
  return absl::StrJoin(parts, " ");
}

size_t DiscourseWindow::TriggerOffsetInText() const {
  size_t offset = 0;
  for (const std::string& s : prefix) offset += s.size() + 1;
  return offset + trigger_begin;
}

std::vector<std::string> DiscourseWindow::Tokens() const {
  return absl::StrSplit(Text(), absl::ByAnyChar(" \t\n"), absl::SkipEmpty());
}

json DiscourseWindow::ToJson() const {
  return json{{"mention_id", mention_id},
              {"prefix", prefix},
              {"center", center},
              {"suffix", suffix},
              {"w", w},
              {"trigger", {trigger_begin, trigger_end}},
              {"head_lemma", head_lemma}};
}

absl::StatusOr<DiscourseWindow> DiscourseWindow::FromJson(const json& j) {
  if (!j.is_object()) return absl::InvalidArgumentError("window not an object");
  DiscourseWindow w;
  auto prefix = StringList(j, "prefix");
  if (!prefix.ok()) return prefix.status();
  auto suffix = StringList(j, "suffix");
  if (!suffix.ok()) return suffix.status();
  w.prefix = *std::move(prefix);
  w.suffix = *std::move(suffix);
  if (!j.contains("mention_id") || !j["mention_id"].is_string() ||
      !j.contains("center") || !j["center"].is_string() ||
      !j.contains("head_lemma") || !j["head_lemma"].is_string()) {
    return absl::InvalidArgumentError(
        "window needs string mention_id, center and head_lemma");
  }
  w.mention_id = j["mention_id"].get<std::string>();
  w.center = j["center"].get<std::string>();
  w.head_lemma = j["head_lemma"].get<std::string>();
  w.w = j.value("w", kDefaultWindowRadius);
  const json& trig = j.value("trigger", json::array());
  if (!trig.is_array() || trig.size() != 2 || !trig[0].is_number_unsigned() ||
      !trig[1].is_number_unsigned()) {
    return absl::InvalidArgumentError("window trigger must be [begin, end]");
  }
  w.trigger_begin = trig[0].get<size_t>();
  w.trigger_end = trig[1].get<size_t>();
  if (w.trigger_begin >= w.trigger_end || w.trigger_end > w.center.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "trigger offsets outside center of window ", w.mention_id));
  }
  return w;
}

std::string_view PairLabelName(PairLabel label) {
  return label == PairLabel::kCoref ? "coref" : "not_coref";
}

absl::StatusOr<PairLabel> ParsePairLabel(std::string_view name) {
  if (name == "coref") return PairLabel::kCoref;
  if (name == "not_coref") return PairLabel::kNotCoref;
  return absl::InvalidArgumentError(absl::StrCat("unknown label \"", AbslSv(name), "\""));
}

json MentionPair::ToJson() const {
  return json{{"pair_id", pair_id},
              {"first", first.ToJson()},
              {"second", second.ToJson()},
              {"label", PairLabelName(label)},
              {"rank", rank}};
}

absl::StatusOr<MentionPair> MentionPair::FromJson(const json& j) {
  if (!j.is_object() || !j.contains("pair_id") || !j["pair_id"].is_string() ||
      !j.contains("label") || !j["label"].is_string() ||
      !j.contains("first") || !j.contains("second")) {
    return absl::InvalidArgumentError(
        "pair needs pair_id, first, second and label");
  }
  MentionPair p;
  p.pair_id = j["pair_id"].get<std::string>();
  auto first = DiscourseWindow::FromJson(j["first"]);
  if (!first.ok()) return first.status();
  auto second = DiscourseWindow::FromJson(j["second"]);
  if (!second.ok()) return second.status();
  auto label = ParsePairLabel(j["label"].get<std::string>());
  if (!label.ok()) return label.status();
  p.first = *std::move(first);
  p.second = *std::move(second);
  p.label = *label;
  p.rank = j.value("rank", 0);
  return p;
}

absl::Status CheckPairIdsUnique(const std::vector<MentionPair>& pairs) {
  std::set<std::string_view> seen;
  for (const MentionPair& p : pairs) {
    if (!seen.insert(p.pair_id).second) {
      return absl::FailedPreconditionError(
          absl::StrCat("duplicate pair_id ", p.pair_id));
    }
  }
  return absl::OkStatus();
}

std::string SerializePairs(const std::vector<MentionPair>& pairs) {
  std::string out;
  for (const MentionPair& p : pairs) absl::StrAppend(&out, p.ToJson().dump(), "\n");
  return out;
}

absl::StatusOr<std::vector<MentionPair>> ParsePairs(std::string_view jsonl) {
  std::vector<MentionPair> pairs;
  size_t line_no = 0;
  for (std::string_view line : SplitSv(jsonl, '\n')) {
    ++line_no;
    if (StripWhitespace(line).empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": not JSON"));
    }
    auto pair = MentionPair::FromJson(j);
    if (!pair.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": ", pair.status().message()));
    }
    pairs.push_back(*std::move(pair));
  }
  if (absl::Status st = CheckPairIdsUnique(pairs); !st.ok()) return st;
  return pairs;
}

absl::StatusOr<DiscourseWindow> ExtractWindow(const Corpus& corpus,
                                              std::string_view mention_id,
                                              int w) {
  if (w < 0) return absl::InvalidArgumentError("window radius must be >= 0");
  const Mention* m = corpus.FindMention(mention_id);
  if (m == nullptr) {
    return absl::NotFoundError(absl::StrCat("unknown mention ", AbslSv(mention_id)));
  }
  const Document& doc = *corpus.FindDocument(m->doc_id);
  const int n = static_cast<int>(doc.sentences.size());
  const int i = m->sent_idx;

  DiscourseWindow window;
  window.mention_id = m->mention_id;
  window.w = w;
  window.head_lemma = m->head_lemma;
  for (int s = std::max(0, i - w); s < i; ++s) {
    window.prefix.push_back(doc.sentences[s].Text());
  }
  const Sentence& center = doc.sentences[i];
  window.center = center.Text();
  for (int s = i + 1; s <= std::min(n - 1, i + w); ++s) {
    window.suffix.push_back(doc.sentences[s].Text());
  }
  size_t offset = 0;
  for (int t = 0; t < m->span.start; ++t) offset += center.tokens[t].size() + 1;
  window.trigger_begin = offset;
  window.trigger_end = offset + m->trigger_text.size();
  return window;
}

TokenOverlapSimilarity::TokenOverlapSimilarity(const Corpus& corpus, int w) {
  for (const auto& [id, m] : corpus.mentions()) {
    absl::StatusOr<DiscourseWindow> window = ExtractWindow(corpus, id, w);
    std::set<std::string>& tokens = content_[id];
    if (!window.ok()) continue;
    for (std::string& token : window->Tokens()) {
      std::string lower = absl::AsciiStrToLower(token);
      // Strip surrounding punctuation so "pool," and "pool" agree.
      size_t b = 0, e = lower.size();
      while (b < e && absl::ascii_ispunct(lower[b])) ++b;
      while (e > b && absl::ascii_ispunct(lower[e - 1])) --e;
      lower = lower.substr(b, e - b);
      const bool has_alnum = std::any_of(lower.begin(), lower.end(), [](char c) {
        return absl::ascii_isalnum(static_cast<unsigned char>(c)) ||
               (static_cast<unsigned char>(c) & 0x80);
      });
      if (!has_alnum || IsStopword(lower)) continue;
      tokens.insert(std::move(lower));
    }
  }
}

bool TokenOverlapSimilarity::IsStopword(std::string_view lowercase_token) {
  return std::find(std::begin(kStopwords), std::end(kStopwords),
                   lowercase_token) != std::end(kStopwords);
}

double TokenOverlapSimilarity::Score(const Mention& a, const Mention& b) const {
  auto ia = content_.find(a.mention_id);
  auto ib = content_.find(b.mention_id);
  if (ia == content_.end() || ib == content_.end()) return 0.0;
  size_t shared = 0;
  auto x = ia->second.begin();
  auto y = ib->second.begin();
  while (x != ia->second.end() && y != ib->second.end()) {
    if (*x < *y) {
      ++x;
    } else if (*y < *x) {
      ++y;
    } else {
      ++shared;
      ++x;
      ++y;
    }
  }
  return static_cast<double>(shared);
}

absl::StatusOr<Neighbors> RetrieveNearest(const Corpus& corpus,
                                          std::string_view anchor, int k,
                                          const SimilarityPlugin& sim,
                                          RetrievalScope scope) {
  if (k < 1) return absl::InvalidArgumentError("k must be >= 1");
  const Mention* a = corpus.FindMention(anchor);
  if (a == nullptr) {
    return absl::NotFoundError(absl::StrCat("unknown mention ", AbslSv(anchor)));
  }
  const std::string& topic = corpus.TopicOf(*a);
  std::vector<std::pair<double, const std::string*>> candidates;
  for (const auto& [id, m] : corpus.mentions()) {
    if (id == anchor) continue;
    if (scope == RetrievalScope::kWithinTopic && corpus.TopicOf(m) != topic) {
      continue;
    }
    candidates.emplace_back(sim.Score(*a, m), &id);
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const auto& x, const auto& y) {
              if (x.first != y.first) return x.first > y.first;
              return *x.second < *y.second;
            });
  Neighbors out;
  out.is_short = static_cast<int>(candidates.size()) < k;
  const size_t n = std::min(candidates.size(), static_cast<size_t>(k));
  for (size_t i = 0; i < n; ++i) {
    out.mention_ids.push_back(*candidates[i].second);
    out.scores.push_back(candidates[i].first);
  }
  return out;
}

absl::StatusOr<PairDataset> BuildPairDataset(const Corpus& corpus,
                                             const PairingOptions& options,
                                             const SimilarityPlugin& sim) {
  PairDataset dataset;
  dataset.k_train = options.k_train;
  dataset.k_infer = options.k_infer;
  const int k =
      corpus.split() == Split::kTrain ? options.k_train : options.k_infer;

  std::map<std::string, DiscourseWindow, std::less<>> windows;
  for (const auto& [id, m] : corpus.mentions()) {
    auto window = ExtractWindow(corpus, id, options.w);
    if (!window.ok()) return window.status();
    windows.emplace(id, *std::move(window));
  }

  for (const auto& [anchor_id, anchor] : corpus.mentions()) {
    auto neighbors = RetrieveNearest(corpus, anchor_id, k, sim, options.scope);
    if (!neighbors.ok()) return neighbors.status();
    if (neighbors->is_short) dataset.short_anchors.push_back(anchor_id);
    for (size_t r = 0; r < neighbors->mention_ids.size(); ++r) {
      const std::string& other_id = neighbors->mention_ids[r];
      const Mention& other = *corpus.FindMention(other_id);
      MentionPair pair;
      pair.pair_id = absl::StrCat(anchor_id, "|", other_id);
      pair.first = windows.find(anchor_id)->second;
      pair.second = windows.find(other_id)->second;
      pair.label = anchor.gold_cluster_id == other.gold_cluster_id
                       ? PairLabel::kCoref
                       : PairLabel::kNotCoref;
      pair.rank = static_cast<int>(r) + 1;
      dataset.pairs.push_back(std::move(pair));
    }
  }
  if (absl::Status st = CheckPairIdsUnique(dataset.pairs); !st.ok()) return st;
  return dataset;
}

}  // namespace ecr
