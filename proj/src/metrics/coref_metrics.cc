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

#include <set>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "ecr/metrics/assignment.h"

namespace ecr::metrics {
namespace {

using Clusters = std::vector<std::vector<std::string>>;

absl::Status CheckUniverse(const ClusterSet& key, const ClusterSet& response) {
  if (key.universe() == response.universe()) return absl::OkStatus();
  std::string example;
  for (const std::string& m : key.universe()) {
    if (!response.universe().count(m)) {
      example = absl::StrCat(" (", m, " only in key)");
      break;
    }
  }
  if (example.empty()) {
    for (const std::string& m : response.universe()) {
      if (!key.universe().count(m)) {
        example = absl::StrCat(" (", m, " only in response)");
        break;
      }
    }
  }
  return absl::FailedPreconditionError(
      absl::StrCat("key and response cover different mentions", example));
}

double Ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

// Number of `other` clusters that `cluster` is split across.
size_t Parts(const std::vector<std::string>& cluster, const ClusterSet& other) {
  std::set<size_t> ids;
  for (const std::string& m : cluster) ids.insert(*other.ClusterOf(m));
  return ids.size();
}

size_t Overlap(const std::vector<std::string>& a,
               const std::vector<std::string>& b) {
  // Clusters are stored sorted.
  size_t i = 0, j = 0, n = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

// MUC recall direction: links of `gold` recovered by `pred`.
std::pair<double, double> MucSide(const ClusterSet& gold,
                                  const ClusterSet& pred) {
  double num = 0, den = 0;
  for (const auto& k : gold.clusters()) {
    num += static_cast<double>(k.size()) -
           static_cast<double>(Parts(k, pred));
    den += static_cast<double>(k.size()) - 1.0;
  }
  return {num, den};
}

std::pair<double, double> BCubedSide(const ClusterSet& gold,
                                     const ClusterSet& pred) {
  double num = 0;
  for (const auto& k : gold.clusters()) {
    for (const std::string& m : k) {
      const auto& r = pred.clusters()[*pred.ClusterOf(m)];
      num += static_cast<double>(Overlap(k, r)) /
             static_cast<double>(k.size());
    }
  }
  return {num, static_cast<double>(gold.universe().size())};
}

double Links(size_t n) { return static_cast<double>(n) * (n - 1) / 2.0; }

std::pair<double, double> LeaSide(const ClusterSet& gold,
                                  const ClusterSet& pred,
                                  LeaSingletons singletons) {
  double num = 0, den = 0;
  for (const auto& k : gold.clusters()) {
    const double importance = static_cast<double>(k.size());
    double resolution = 0.0;
    if (k.size() == 1) {
      if (singletons == LeaSingletons::kExclude) continue;
      const auto& r = pred.clusters()[*pred.ClusterOf(k[0])];
      resolution = r.size() == 1 ? 1.0 : 0.0;
    } else {
      std::set<size_t> touched;
      for (const std::string& m : k) touched.insert(*pred.ClusterOf(m));
      double resolved = 0;
      for (size_t r : touched) resolved += Links(Overlap(k, pred.clusters()[r]));
      resolution = resolved / Links(k.size());
    }
    num += importance * resolution;
    den += importance;
  }
  return {num, den};
}

}  // namespace

Prf MakePrf(double recall_num, double recall_den, double precision_num,
            double precision_den) {
  Prf p;
  p.recall = Ratio(recall_num, recall_den);
  p.precision = Ratio(precision_num, precision_den);
  p.f1 = Ratio(2.0 * p.recall * p.precision, p.recall + p.precision);
  return p;
}

absl::StatusOr<Prf> Muc(const ClusterSet& key, const ClusterSet& response) {
  if (absl::Status st = CheckUniverse(key, response); !st.ok()) return st;
  auto [rn, rd] = MucSide(key, response);
  auto [pn, pd] = MucSide(response, key);
  return MakePrf(rn, rd, pn, pd);
}

absl::StatusOr<Prf> BCubed(const ClusterSet& key, const ClusterSet& response) {
  if (absl::Status st = CheckUniverse(key, response); !st.ok()) return st;
  auto [rn, rd] = BCubedSide(key, response);
  auto [pn, pd] = BCubedSide(response, key);
  return MakePrf(rn, rd, pn, pd);
}

absl::StatusOr<Prf> CeafE(const ClusterSet& key, const ClusterSet& response) {
  if (absl::Status st = CheckUniverse(key, response); !st.ok()) return st;
  const Clusters& k = key.clusters();
  const Clusters& r = response.clusters();
  std::vector<std::vector<double>> phi(k.size(),
                                       std::vector<double>(r.size(), 0.0));
  for (size_t i = 0; i < k.size(); ++i) {
    for (size_t j = 0; j < r.size(); ++j) {
      phi[i][j] = 2.0 * static_cast<double>(Overlap(k[i], r[j])) /
                  static_cast<double>(k[i].size() + r[j].size());
    }
  }
  const double similarity = MaxWeightAssignment(phi).total;
  return MakePrf(similarity, static_cast<double>(k.size()), similarity,
                 static_cast<double>(r.size()));
}

absl::StatusOr<Prf> Lea(const ClusterSet& key, const ClusterSet& response,
                        LeaSingletons singletons) {
  if (absl::Status st = CheckUniverse(key, response); !st.ok()) return st;
  auto [rn, rd] = LeaSide(key, response, singletons);
  auto [pn, pd] = LeaSide(response, key, singletons);
  return MakePrf(rn, rd, pn, pd);
}

absl::StatusOr<MetricReport> Conll(const ClusterSet& key,
                                   const ClusterSet& response,
                                   LeaSingletons singletons) {
  MetricReport report;
  auto muc = Muc(key, response);
  if (!muc.ok()) return muc.status();
  report.muc = *muc;
  report.b_cubed = *BCubed(key, response);
  report.ceaf_e = *CeafE(key, response);
  report.lea = *Lea(key, response, singletons);
  report.conll_f1 =
      (report.muc.f1 + report.b_cubed.f1 + report.ceaf_e.f1) / 3.0;
  return report;
}

nlohmann::json MetricReport::ToJson() const {
  auto prf = [](const Prf& p) {
    return nlohmann::json{
        {"recall", p.recall}, {"precision", p.precision}, {"f1", p.f1}};
  };
  return nlohmann::json{{"muc", prf(muc)},
                        {"b_cubed", prf(b_cubed)},
                        {"ceaf_e", prf(ceaf_e)},
                        {"lea", prf(lea)},
                        {"conll_f1", conll_f1}};
}

std::string MetricReport::ToTable() const {
  std::string out = absl::StrFormat("%-21s%-21s%-21s%-21s%s\n", "MUC", "B3",
                                    "CEAF_e", "LEA", "CoNLL");
  for (int i = 0; i < 4; ++i) absl::StrAppend(&out, "R      P      F1     ");
  absl::StrAppend(&out, "F1\n");
  for (const Prf* p : {&muc, &b_cubed, &ceaf_e, &lea}) {
    absl::StrAppend(&out, absl::StrFormat("%-7.1f%-7.1f%-7.1f", 100 * p->recall,
                                          100 * p->precision, 100 * p->f1));
  }
  absl::StrAppend(&out, absl::StrFormat("%.1f\n", 100 * conll_f1));
  return out;
}

}  // namespace ecr::metrics
