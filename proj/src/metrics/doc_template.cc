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

#include "ecr/metrics/doc_template.h"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <set>
#include <tuple>

#include "absl/strings/str_cat.h"
#include "ecr/status_macros.h"
#include "ecr/strings.h"

namespace ecr::metrics {
namespace {

constexpr std::string_view kInstruction =
    "Annotate all event mentions in the following text with coreference "
    "clusters. Use Markdown tags to indicate clusters in the output, with the "
    "following format [mention](#cluster_name):\n";

// Beyond this many DP cells the aligner falls back to a greedy walk.
constexpr size_t kMaxAlignCells = size_t{64} << 20;

struct Tag {
  size_t begin = 0;  // offsets into the untagged response text
  size_t end = 0;
  std::string text;
  std::string id;
};

struct Stripped {
  std::string plain;
  std::vector<Tag> tags;
};

bool IsSpace(char c) { return std::isspace(static_cast<unsigned char>(c)); }

// A tag is "[" text "](#" id ")", with "\#" accepted for "#". A "[" that does
// not open a tag is ordinary text.
absl::StatusOr<Stripped> StripTags(std::string_view raw) {
  Stripped out;
  size_t i = 0;
  while (i < raw.size()) {
    if (raw[i] != '[') {
      out.plain.push_back(raw[i++]);
      continue;
    }
    const size_t close = raw.find(']', i + 1);
    const size_t next_open = raw.find('[', i + 1);
    if (close == std::string_view::npos ||
        (next_open != std::string_view::npos && next_open < close)) {
      out.plain.push_back(raw[i++]);
      continue;
    }
    size_t p = close + 1;
    if (p >= raw.size() || raw[p] != '(') {
      out.plain.push_back(raw[i++]);
      continue;
    }
    ++p;
    if (p < raw.size() && raw[p] == '\\') ++p;
    if (p >= raw.size() || raw[p] != '#') {
      out.plain.push_back(raw[i++]);
      continue;
    }
    const size_t id_begin = p + 1;
    const size_t id_end = raw.find(')', id_begin);
    const size_t newline = raw.find('\n', id_begin);
    if (id_end == std::string_view::npos ||
        (newline != std::string_view::npos && newline < id_end)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "unterminated mention tag at byte ", i, ": ",
          AbslSv(raw.substr(i, std::min<size_t>(40, raw.size() - i)))));
    }
    Tag tag;
    tag.text = std::string(raw.substr(i + 1, close - i - 1));
    tag.id = std::string(StripWhitespace(raw.substr(id_begin, id_end - id_begin)));
    tag.begin = out.plain.size();
    out.plain += tag.text;
    tag.end = out.plain.size();
    out.tags.push_back(std::move(tag));
    i = id_end + 1;
  }
  return out;
}

struct Folded {
  std::string chars;           // lowercased non-space characters
  std::vector<size_t> offset;  // their byte offsets in the source
};

Folded Fold(std::string_view text) {
  Folded f;
  for (size_t i = 0; i < text.size(); ++i) {
    if (IsSpace(text[i])) continue;
    f.chars.push_back(
        static_cast<char>(std::tolower(static_cast<unsigned char>(text[i]))));
    f.offset.push_back(i);
  }
  return f;
}

// For each character of `b`, the index of the `a` character it aligns to in a
// longest common subsequence, or -1.
std::vector<int64_t> Align(const std::string& a, const std::string& b) {
  std::vector<int64_t> map(b.size(), -1);
  size_t lo = 0;
  while (lo < a.size() && lo < b.size() && a[lo] == b[lo]) {
    map[lo] = static_cast<int64_t>(lo);
    ++lo;
  }
  size_t ahi = a.size(), bhi = b.size();
  while (ahi > lo && bhi > lo && a[ahi - 1] == b[bhi - 1]) {
    --ahi;
    --bhi;
    map[bhi] = static_cast<int64_t>(ahi);
  }
  const size_t n = ahi - lo, m = bhi - lo;
  if (n == 0 || m == 0) return map;
  if ((n + 1) * (m + 1) > kMaxAlignCells) {
    size_t i = lo;
    for (size_t j = lo; j < bhi && i < ahi; ++j) {
      size_t k = i;
      while (k < ahi && k < i + 64 && a[k] != b[j]) ++k;
      if (k < ahi && a[k] == b[j]) {
        map[j] = static_cast<int64_t>(k);
        i = k + 1;
      }
    }
    return map;
  }
  // Suffix LCS lengths, rolled; directions kept for the walk back.
  std::vector<uint8_t> dir((n + 1) * (m + 1), 0);
  std::vector<uint32_t> next(m + 1, 0), cur(m + 1, 0);
  for (size_t i = n; i-- > 0;) {
    cur[m] = 0;
    for (size_t j = m; j-- > 0;) {
      uint8_t d;
      if (a[lo + i] == b[lo + j]) {
        cur[j] = next[j + 1] + 1;
        d = 0;
      } else if (next[j] >= cur[j + 1]) {
        cur[j] = next[j];
        d = 1;
      } else {
        cur[j] = cur[j + 1];
        d = 2;
      }
      dir[i * (m + 1) + j] = d;
    }
    std::swap(cur, next);
  }
  size_t i = 0, j = 0;
  while (i < n && j < m) {
    switch (dir[i * (m + 1) + j]) {
      case 0:
        map[lo + j] = static_cast<int64_t>(lo + i);
        ++i;
        ++j;
        break;
      case 1:
        ++i;
        break;
      default:
        ++j;
    }
  }
  return map;
}

size_t NonSpaceCount(std::string_view text) {
  return static_cast<size_t>(std::count_if(
      text.begin(), text.end(), [](char c) { return !IsSpace(c); }));
}

}  // namespace

LlmErrorTaxonomy& LlmErrorTaxonomy::operator+=(const LlmErrorTaxonomy& other) {
  missing_type1 += other.missing_type1;
  missing_type2 += other.missing_type2;
  redundant += other.redundant;
  wrong_prediction += other.wrong_prediction;
  return *this;
}

nlohmann::json LlmErrorTaxonomy::ToJson() const {
  return nlohmann::json{{"missing_type1", missing_type1},
                        {"missing_type2", missing_type2},
                        {"redundant", redundant},
                        {"wrong_prediction", wrong_prediction}};
}

absl::StatusOr<DocTemplateInput> BuildDocTemplateInput(
    const Corpus& corpus, std::string input_id,
    const std::vector<std::string>& doc_ids) {
  DocTemplateInput input;
  input.input_id = std::move(input_id);
  // (doc, sentence) -> byte offset of each token.
  std::map<std::pair<std::string, int>, std::vector<size_t>> token_offsets;
  for (const std::string& doc_id : doc_ids) {
    const Document* doc = corpus.FindDocument(doc_id);
    if (doc == nullptr) {
      return absl::NotFoundError(absl::StrCat("unknown document ", doc_id));
    }
    if (!input.text.empty()) input.text += "\n\n";
    for (size_t s = 0; s < doc->sentences.size(); ++s) {
      if (s > 0) input.text += ' ';
      std::vector<size_t>& offsets =
          token_offsets[{doc_id, doc->sentences[s].index}];
      const auto& tokens = doc->sentences[s].tokens;
      for (size_t t = 0; t < tokens.size(); ++t) {
        if (t > 0) input.text += ' ';
        offsets.push_back(input.text.size());
        input.text += tokens[t];
      }
    }
  }
  for (const auto& [id, m] : corpus.mentions()) {
    auto it = token_offsets.find({m.doc_id, m.sent_idx});
    if (it == token_offsets.end()) continue;
    const size_t begin = it->second[m.span.start];
    input.gold.push_back(
        {id, begin, begin + m.trigger_text.size(), m.gold_cluster_id});
  }
  std::sort(input.gold.begin(), input.gold.end(),
            [](const GoldSpan& a, const GoldSpan& b) {
              return std::tie(a.begin, a.end, a.mention_id) <
                     std::tie(b.begin, b.end, b.mention_id);
            });
  return input;
}

std::string RenderDocTemplatePrompt(const DocTemplateInput& input) {
  std::string out(kInstruction);
  size_t pos = 0;
  for (const GoldSpan& g : input.gold) {
    if (g.begin < pos) continue;
    out.append(input.text, pos, g.begin - pos);
    absl::StrAppend(&out, "[", input.text.substr(g.begin, g.end - g.begin),
                    "](#)");
    pos = g.end;
  }
  out.append(input.text, pos);
  return out;
}

absl::StatusOr<DocTemplateAnnotation> ParseDocTemplate(
    const DocTemplateInput& input, std::string_view raw) {
  if (StripWhitespace(raw).empty()) {
    return absl::InvalidArgumentError("empty document-template response");
  }
  ECR_ASSIGN_OR_RETURN(Stripped stripped, StripTags(raw));
  const Folded doc = Fold(input.text);
  const Folded resp = Fold(stripped.plain);
  const std::vector<int64_t> map = Align(doc.chars, resp.chars);

  // Document byte offset -> folded index, for counting overlap in gold spans.
  std::vector<size_t> folded_at(input.text.size() + 1, 0);
  for (size_t i = 0, k = 0; i <= input.text.size(); ++i) {
    folded_at[i] = k;
    if (k < doc.offset.size() && doc.offset[k] == i) ++k;
  }

  DocTemplateAnnotation ann;
  ann.mentions.reserve(input.gold.size());
  for (const GoldSpan& g : input.gold) ann.mentions.push_back({g.mention_id, {}});
  std::vector<bool> claimed(input.gold.size(), false);
  std::vector<bool> tagged(input.gold.size(), false);

  size_t r = 0;  // cursor into resp.offset
  for (const Tag& tag : stripped.tags) {
    while (r < resp.offset.size() && resp.offset[r] < tag.begin) ++r;
    std::vector<size_t> hits;  // folded doc indices covered by the tag
    for (size_t k = r; k < resp.offset.size() && resp.offset[k] < tag.end; ++k) {
      if (map[k] >= 0) hits.push_back(static_cast<size_t>(map[k]));
    }
    const size_t tag_len = NonSpaceCount(tag.text);
    std::optional<size_t> match;
    for (size_t g = 0; g < input.gold.size() && !hits.empty(); ++g) {
      if (claimed[g]) continue;
      const size_t gb = folded_at[input.gold[g].begin];
      const size_t ge = folded_at[input.gold[g].end];
      const size_t overlap = static_cast<size_t>(std::count_if(
          hits.begin(), hits.end(),
          [&](size_t h) { return h >= gb && h < ge; }));
      if (2 * overlap > tag_len && 2 * overlap > ge - gb) {
        match = g;
        break;
      }
    }
    if (!match) {
      ann.redundant.push_back({tag.text, tag.id});
      ++ann.errors.redundant;
      continue;
    }
    claimed[*match] = true;
    tagged[*match] = true;
    if (tag.id.empty()) {
      ++ann.errors.missing_type1;
    } else {
      ann.mentions[*match].cluster = tag.id;
    }
  }
  for (size_t g = 0; g < input.gold.size(); ++g) {
    if (!tagged[g]) ++ann.errors.missing_type2;
  }

  // A labelled mention is wrong when its response cluster and its gold
  // cluster disagree on the other labelled mentions.
  for (size_t g = 0; g < input.gold.size(); ++g) {
    if (!ann.mentions[g].cluster) continue;
    bool wrong = false;
    for (size_t h = 0; h < input.gold.size() && !wrong; ++h) {
      if (h == g || !ann.mentions[h].cluster) continue;
      const bool same_resp = *ann.mentions[h].cluster == *ann.mentions[g].cluster;
      const bool same_gold =
          input.gold[h].cluster_id == input.gold[g].cluster_id;
      wrong = same_resp != same_gold;
    }
    if (wrong) ++ann.errors.wrong_prediction;
  }
  return ann;
}

absl::StatusOr<ClusterSet> ResponseClustering(
    const DocTemplateInput& input, const DocTemplateAnnotation& annotation) {
  if (annotation.mentions.size() != input.gold.size()) {
    return absl::InvalidArgumentError(
        "annotation does not belong to this document-template input");
  }
  std::set<std::string> universe;
  std::map<std::string, std::vector<std::string>> by_id;
  for (const TaggedMention& m : annotation.mentions) {
    universe.insert(m.mention_id);
    if (m.cluster) {
      by_id[absl::StrCat(input.input_id, "/", *m.cluster)].push_back(
          m.mention_id);
    }
  }
  std::vector<std::vector<std::string>> clusters;
  for (auto& [id, members] : by_id) clusters.push_back(std::move(members));
  return ClusterSet::Create(std::move(clusters), std::move(universe));
}

}  // namespace ecr::metrics
