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

#include <cstdlib>
#include <set>

#include "absl/strings/match.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "ecr/strings.h"

namespace ecr::metrics {
namespace {

double Ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

std::string StripMarkup(std::string_view line) {
  std::string out;
  for (char c : line) {
    if (c != '*' && c != '_' && c != '`') out.push_back(c);
  }
  return out;
}

// Returns the text after `label` (plain or plural with 's') and a colon.
std::optional<std::string> FieldValue(const std::string& line,
                                      std::string_view label) {
  std::string lower = ToLowerAscii(StripWhitespace(line));
  if (!absl::StartsWith(lower, AbslSv(label))) return std::nullopt;
  size_t pos = label.size();
  if (pos < lower.size() && lower[pos] == 's') ++pos;
  while (pos < lower.size() && lower[pos] == ' ') ++pos;
  if (pos >= lower.size() || lower[pos] != ':') return std::nullopt;
  std::string_view rest = StripWhitespace(line);
  return std::string(StripWhitespace(rest.substr(pos + 1)));
}

std::optional<bool> Label(std::string value) {
  value = ToLowerAscii(value);
  while (!value.empty() && (value.back() == '.' || value.back() == '\'' ||
                            value.back() == '"')) {
    value.pop_back();
  }
  while (!value.empty() && (value.front() == '\'' || value.front() == '"')) {
    value.erase(0, 1);
  }
  if (value == "coreferential") return true;
  if (value == "non-coreferential" || value == "not coreferential" ||
      value == "not-coreferential" || value == "non coreferential") {
    return false;
  }
  return std::nullopt;
}

}  // namespace

CotAnswer ParsePairwiseCot(std::string_view raw) {
  CotAnswer answer;
  for (std::string_view piece : SplitSv(raw, '\n')) {
    const std::string line = StripMarkup(piece);
    if (!answer.coreferential) {
      if (auto v = FieldValue(line, "coreferential result")) {
        answer.coreferential = Label(*v);
        continue;
      }
    }
    if (!answer.score) {
      if (auto v = FieldValue(line, "coreferential score")) {
        double score = 0.0;
        std::string number(*v);
        while (!number.empty() && number.back() == '.') number.pop_back();
        if (absl::SimpleAtod(number, &score) && score >= 0.0 && score <= 1.0) {
          answer.score = score;
        }
      }
    }
  }
  return answer;
}

PairwiseReport PairwiseReport::FromCounts(size_t tp, size_t fp, size_t tn,
                                          size_t fn, size_t n_incomplete) {
  PairwiseReport r;
  r.tp = tp;
  r.fp = fp;
  r.tn = tn;
  r.fn = fn;
  r.n_complete = tp + fp + tn + fn;
  r.n_total = r.n_complete + n_incomplete;
  r.recall = Ratio(tp, tp + fn);
  r.precision = Ratio(tp, tp + fp);
  r.f1 = Ratio(2.0 * r.recall * r.precision, r.recall + r.precision);
  r.positive_rate = Ratio(tp + fp, r.n_complete);
  r.accuracy = Ratio(tp + tn, r.n_total);
  r.tcomp = Ratio(r.n_complete, r.n_total);
  return r;
}

nlohmann::json PairwiseReport::ToJson() const {
  return nlohmann::json{{"recall", recall},       {"precision", precision},
                        {"f1", f1},               {"positive_rate", positive_rate},
                        {"accuracy", accuracy},   {"tcomp", tcomp},
                        {"n_total", n_total},     {"n_complete", n_complete},
                        {"tp", tp},               {"fp", fp},
                        {"tn", tn},               {"fn", fn}};
}

absl::StatusOr<PairwiseReport> ComputePairwiseReport(
    const std::map<std::string, bool, std::less<>>& gold,
    const std::vector<PairwisePrediction>& predictions) {
  std::set<std::string_view> seen;
  size_t tp = 0, fp = 0, tn = 0, fn = 0, incomplete = 0;
  for (const PairwisePrediction& p : predictions) {
    auto it = gold.find(p.pair_id);
    if (it == gold.end()) {
      return absl::InvalidArgumentError(
          absl::StrCat("prediction for unknown pair ", p.pair_id));
    }
    if (!seen.insert(p.pair_id).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate prediction for pair ", p.pair_id));
    }
    if (!p.coreferential) {
      ++incomplete;
    } else if (*p.coreferential) {
      ++(it->second ? tp : fp);
    } else {
      ++(it->second ? fn : tn);
    }
  }
  if (seen.size() != gold.size()) {
    for (const auto& [id, label] : gold) {
      if (!seen.count(id)) {
        return absl::InvalidArgumentError(
            absl::StrCat("no prediction for pair ", id));
      }
    }
  }
  return PairwiseReport::FromCounts(tp, fp, tn, fn, incomplete);
}

}  // namespace ecr::metrics
