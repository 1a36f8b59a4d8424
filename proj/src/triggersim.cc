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

#include "ecr/triggersim.h"
#include "ecr/strings.h"

#include <algorithm>

#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"

namespace ecr {

std::vector<char32_t> DecodeUtf8(std::string_view text) {
  std::vector<char32_t> out;
  out.reserve(text.size());
  size_t i = 0;
  while (i < text.size()) {
    const auto lead = static_cast<unsigned char>(text[i]);
    int extra = 0;
    char32_t cp = lead;
    if (lead >= 0xF0 && lead <= 0xF4) {
      extra = 3;
      cp = lead & 0x07;
    } else if (lead >= 0xE0) {
      extra = 2;
      cp = lead & 0x0F;
    } else if (lead >= 0xC2 && lead < 0xE0) {
      extra = 1;
      cp = lead & 0x1F;
    }
    bool valid = extra > 0;
    for (int k = 1; valid && k <= extra; ++k) {
      if (i + k >= text.size()) {
        valid = false;
        break;
      }
      const auto c = static_cast<unsigned char>(text[i + k]);
      if ((c & 0xC0) != 0x80) {
        valid = false;
        break;
      }
      cp = (cp << 6) | (c & 0x3F);
    }
    if (extra > 0 && valid) {
      out.push_back(cp);
      i += extra + 1;
    } else {
      out.push_back(lead);
      ++i;
    }
  }
  return out;
}

int64_t EditDistance(std::u32string_view a, std::u32string_view b,
                     EditMetric metric) {
  if (metric == EditMetric::kIndel) {
    // Indel distance = |a| + |b| - 2 * LCS(a, b).
    std::vector<int64_t> row(b.size() + 1, 0);
    for (size_t i = 1; i <= a.size(); ++i) {
      int64_t diag = 0;
      for (size_t j = 1; j <= b.size(); ++j) {
        const int64_t up = row[j];
        row[j] = a[i - 1] == b[j - 1] ? diag + 1 : std::max(row[j], row[j - 1]);
        diag = up;
      }
    }
    return static_cast<int64_t>(a.size() + b.size()) - 2 * row[b.size()];
  }
  std::vector<int64_t> row(b.size() + 1);
  for (size_t j = 0; j <= b.size(); ++j) row[j] = static_cast<int64_t>(j);
  for (size_t i = 1; i <= a.size(); ++i) {
    int64_t diag = row[0];
    row[0] = static_cast<int64_t>(i);
    for (size_t j = 1; j <= b.size(); ++j) {
      const int64_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1,
                         diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

absl::StatusOr<int> FuzzRatio(std::string_view a, std::string_view b,
                              EditMetric metric) {
  if (a.empty() || b.empty()) {
    return absl::InvalidArgumentError("fuzz ratio of an empty string");
  }
  const std::vector<char32_t> ca = DecodeUtf8(a);
  const std::vector<char32_t> cb = DecodeUtf8(b);
  const int64_t total = static_cast<int64_t>(ca.size() + cb.size());
  const int64_t dist = EditDistance({ca.data(), ca.size()},
                                    {cb.data(), cb.size()}, metric);
  // Exact rational rounding of 100 * (total - dist) / total, ties to even.
  const int64_t num = 100 * std::max<int64_t>(0, total - dist);
  int64_t q = num / total;
  const int64_t rem = num % total;
  if (2 * rem > total || (2 * rem == total && (q % 2) == 1)) ++q;
  return static_cast<int>(q);
}

std::string HeadLemmaNormalizer::Normalize(const DiscourseWindow& window) const {
  std::string lemma(absl::StripAsciiWhitespace(window.head_lemma));
  if (lemma.empty()) lemma = std::string(window.trigger());
  return absl::AsciiStrToLower(lemma);
}

std::string SurfaceNormalizer::Normalize(const DiscourseWindow& window) const {
  return ToLowerAscii(window.trigger());
}

absl::StatusOr<LexicalSimilarityClass> ClassifyPairTriggers(
    const MentionPair& pair, const TriggerNormalizer& normalizer,
    int threshold, EditMetric metric) {
  const std::string a = normalizer.Normalize(pair.first);
  const std::string b = normalizer.Normalize(pair.second);
  if (a.empty() || b.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("empty trigger in pair ", pair.pair_id));
  }
  absl::StatusOr<int> ratio = FuzzRatio(a, b, metric);
  if (!ratio.ok()) return ratio.status();
  return LexicalSimilarityClass{*ratio, *ratio >= threshold};
}

std::string BiasHistogram::ToCsv() const {
  return absl::StrFormat(
      "label,class,count\n"
      "coref,similar,%d\n"
      "coref,divergent,%d\n"
      "not_coref,similar,%d\n"
      "not_coref,divergent,%d\n",
      coref_similar, coref_divergent, not_coref_similar, not_coref_divergent);
}

nlohmann::json BiasHistogram::ToJson() const {
  nlohmann::json j = {
      {"total", Total()},
      {"coref", {{"similar", coref_similar}, {"divergent", coref_divergent}}},
      {"not_coref",
       {{"similar", not_coref_similar}, {"divergent", not_coref_divergent}}},
  };
  j["percent_similar_coref"] =
      percent_similar_coref ? nlohmann::json(*percent_similar_coref * 100.0)
                            : nlohmann::json(nullptr);
  j["mean_ratio_coref"] = mean_ratio_coref ? nlohmann::json(*mean_ratio_coref)
                                           : nlohmann::json(nullptr);
  return j;
}

absl::StatusOr<BiasHistogram> ComputeBiasHistogram(
    const std::vector<MentionPair>& pairs, const TriggerNormalizer& normalizer,
    int threshold, EditMetric metric) {
  if (pairs.empty()) {
    return absl::InvalidArgumentError("bias histogram of an empty dataset");
  }
  BiasHistogram h;
  int64_t ratio_sum = 0;
  for (const MentionPair& p : pairs) {
    auto cls = ClassifyPairTriggers(p, normalizer, threshold, metric);
    if (!cls.ok()) return cls.status();
    if (p.label == PairLabel::kCoref) {
      ratio_sum += cls->ratio;
      (cls->is_similar ? h.coref_similar : h.coref_divergent)++;
    } else {
      (cls->is_similar ? h.not_coref_similar : h.not_coref_divergent)++;
    }
  }
  const int64_t coref = h.coref_similar + h.coref_divergent;
  if (coref > 0) {
    h.percent_similar_coref =
        static_cast<double>(h.coref_similar) / static_cast<double>(coref);
    h.mean_ratio_coref =
        static_cast<double>(ratio_sum) / static_cast<double>(coref);
  }
  return h;
}

}  // namespace ecr
