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

#include "ecr/scorer.h"

#include <algorithm>
#include <atomic>
#include <map>
#include <optional>
#include <set>
#include <thread>

#include "absl/strings/str_cat.h"
#include "ecr/strings.h"
#include "httplib.h"

namespace ecr {
namespace {

using nlohmann::json;

std::string LemmaKey(const ScoreWindow& w) {
  if (!w.head_lemma.empty()) return ToLowerAscii(w.head_lemma);
  if (w.begin < w.end && w.end <= w.text.size()) {
    return ToLowerAscii(std::string_view(w.text).substr(w.begin, w.end - w.begin));
  }
  return "";
}

absl::Status CheckWindow(const ScoreWindow& w, std::string_view side) {
  if (w.begin >= w.end || w.end > w.text.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat(AbslSv(side), " span [", w.begin, ", ", w.end,
                     ") invalid for text of length ", w.text.size()));
  }
  return absl::OkStatus();
}

struct Endpoint {
  std::string base;  // scheme://host[:port]
  std::string path;  // prefix + /score
};

absl::StatusOr<Endpoint> ParseEndpoint(std::string_view url) {
  const size_t scheme = url.find("://");
  if (scheme == std::string_view::npos ||
      (url.substr(0, scheme) != "http" && url.substr(0, scheme) != "https")) {
    return absl::InvalidArgumentError(absl::StrCat(
        "scorer endpoint must be an http(s) URL, got \"", AbslSv(url), "\""));
  }
  const size_t slash = url.find('/', scheme + 3);
  Endpoint e;
  e.base = std::string(url.substr(0, slash));
  std::string prefix =
      slash == std::string_view::npos ? "" : std::string(url.substr(slash));
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  e.path = prefix + "/score";
  return e;
}

// One batch; fills `out[i]` for every index in `idx`.
void ScoreOneBatch(const std::vector<ScoreRequest>& requests,
                   const std::vector<size_t>& idx, const Endpoint& ep,
                   const ExternalScorerOptions& options,
                   std::vector<absl::StatusOr<ScoreResult>>& out) {
  auto fail_all = [&](const absl::Status& st) {
    for (size_t i : idx) out[i] = st;
  };
  json pairs = json::array();
  for (size_t i : idx) pairs.push_back(requests[i].ToJson());
  const std::string body = json{{"pairs", std::move(pairs)}}.dump();

  httplib::Client cli(ep.base);
  const auto ms = options.timeout.count();
  cli.set_connection_timeout(ms / 1000, (ms % 1000) * 1000);
  cli.set_read_timeout(ms / 1000, (ms % 1000) * 1000);
  cli.set_write_timeout(ms / 1000, (ms % 1000) * 1000);
  httplib::Result res = cli.Post(ep.path, body, "application/json");
  if (!res) res = cli.Post(ep.path, body, "application/json");  // one retry
  if (!res) {
    fail_all(absl::UnavailableError(
        absl::StrCat("scorer transport: ", httplib::to_string(res.error()))));
    return;
  }
  if (res->status != 200) {
    fail_all(absl::DataLossError(absl::StrCat(
        "scorer protocol: HTTP ", res->status, ", payload: ", res->body)));
    return;
  }
  json j = json::parse(res->body, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("scores") ||
      !j["scores"].is_array()) {
    fail_all(absl::DataLossError(
        absl::StrCat("scorer protocol: malformed response, payload: ",
                     res->body)));
    return;
  }
  std::map<std::string, const json*> by_id;
  for (const json& s : j["scores"]) {
    if (s.is_object() && s.contains("pair_id") && s["pair_id"].is_string()) {
      by_id.emplace(s["pair_id"].get<std::string>(), &s);
    }
  }
  for (size_t i : idx) {
    const std::string& id = requests[i].pair_id;
    auto it = by_id.find(id);
    if (it == by_id.end() || !it->second->contains("score") ||
        !(*it->second)["score"].is_number()) {
      out[i] = absl::DataLossError(absl::StrCat(
          "scorer protocol: no numeric score for pair ", id,
          ", payload: ", res->body));
      continue;
    }
    const double score = (*it->second)["score"].get<double>();
    if (!(score >= 0.0 && score <= 1.0)) {
      out[i] = absl::OutOfRangeError(absl::StrCat(
          "scorer validation: score ", score, " for pair ", id,
          " outside [0, 1]"));
      continue;
    }
    out[i] = ScoreResult{id, score};
  }
}

}  // namespace

absl::Status ScoreRequest::Validate() const {
  if (absl::Status st = CheckWindow(first, "first"); !st.ok()) return st;
  return CheckWindow(second, "second");
}

json ScoreRequest::ToJson() const {
  return json{{"pair_id", pair_id},
              {"first", {{"text", first.text}, {"span", {first.begin, first.end}}}},
              {"second",
               {{"text", second.text}, {"span", {second.begin, second.end}}}}};
}

ScoreRequest MakeScoreRequest(const MentionPair& pair) {
  auto window = [](const DiscourseWindow& w) {
    ScoreWindow s;
    s.text = w.Text();
    s.begin = w.TriggerOffsetInText();
    s.end = s.begin + (w.trigger_end - w.trigger_begin);
    s.head_lemma = w.head_lemma;
    return s;
  };
  return ScoreRequest{pair.pair_id, window(pair.first), window(pair.second)};
}

ScoreResult LemmaBaselineScore(const ScoreRequest& request) {
  const std::string a = LemmaKey(request.first);
  const std::string b = LemmaKey(request.second);
  return ScoreResult{request.pair_id, !a.empty() && a == b ? 1.0 : 0.0};
}

ScoreResult LemmaBaselineScore(const MentionPair& pair) {
  return LemmaBaselineScore(MakeScoreRequest(pair));
}

absl::StatusOr<std::vector<absl::StatusOr<ScoreResult>>> ExternalScoreBatch(
    const std::vector<ScoreRequest>& requests,
    const ExternalScorerOptions& options) {
  if (requests.empty()) {
    return absl::InvalidArgumentError("empty scoring batch");
  }
  if (options.batch_size < 1) {
    return absl::InvalidArgumentError("batch size must be >= 1");
  }
  auto ep = ParseEndpoint(options.endpoint);
  if (!ep.ok()) return ep.status();
  std::set<std::string_view> seen;
  for (const ScoreRequest& r : requests) {
    if (!seen.insert(r.pair_id).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate pair_id in scoring batch: ", r.pair_id));
    }
  }

  std::vector<absl::StatusOr<ScoreResult>> out(
      requests.size(), absl::InternalError("not scored"));
  // Invalid requests never leave the process.
  std::vector<std::vector<size_t>> batches;
  std::vector<size_t> current;
  for (size_t i = 0; i < requests.size(); ++i) {
    if (absl::Status st = requests[i].Validate(); !st.ok()) {
      out[i] = st;
      continue;
    }
    current.push_back(i);
    if (current.size() == options.batch_size) {
      batches.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) batches.push_back(std::move(current));

  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t b = next.fetch_add(1); b < batches.size();
         b = next.fetch_add(1)) {
      ScoreOneBatch(requests, batches[b], *ep, options, out);
    }
  };
  const int n = std::max(
      1, std::min<int>(options.max_in_flight, static_cast<int>(batches.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  return out;
}

}  // namespace ecr
