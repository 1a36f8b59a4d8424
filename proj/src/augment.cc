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

#include "ecr/augment.h"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <thread>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "ecr/llm/prompt.h"
#include "ecr/llm/response_parser.h"
#include "ecr/status_macros.h"
#include "ecr/strings.h"

namespace ecr {
namespace {

using nlohmann::json;

constexpr Segment kAllSegments[] = {
    Segment::kFirstPrefix,  Segment::kFirstCenter,  Segment::kFirstSuffix,
    Segment::kSecondPrefix, Segment::kSecondCenter, Segment::kSecondSuffix};

// A generated mention sentence and where its trigger sits.
struct Candidate {
  std::string sentence;
  size_t trigger_begin = 0;
  size_t trigger_end = 0;
  std::string trigger;     // as written in the sentence
  std::string head_lemma;
};

std::optional<size_t> FindNoCase(std::string_view hay, std::string_view needle) {
  if (needle.empty() || needle.size() > hay.size()) return std::nullopt;
  auto it = std::search(hay.begin(), hay.end(), needle.begin(), needle.end(),
                        [](char a, char b) {
                          return std::tolower(static_cast<unsigned char>(a)) ==
                                 std::tolower(static_cast<unsigned char>(b));
                        });
  if (it == hay.end()) return std::nullopt;
  return static_cast<size_t>(it - hay.begin());
}

// Earliest synonym occurrence; the longer synonym wins a tie.
std::optional<Candidate> MatchSynonym(const std::string& sentence,
                                      const std::vector<std::string>& syns) {
  std::optional<Candidate> best;
  for (const std::string& syn : syns) {
    auto pos = FindNoCase(sentence, syn);
    if (!pos) continue;
    if (best && (*pos > best->trigger_begin ||
                 (*pos == best->trigger_begin &&
                  syn.size() <= best->trigger_end - best->trigger_begin))) {
      continue;
    }
    Candidate c;
    c.sentence = sentence;
    c.trigger_begin = *pos;
    c.trigger_end = *pos + syn.size();
    c.trigger = sentence.substr(*pos, syn.size());
    c.head_lemma = ToLowerAscii(syn);
    best = std::move(c);
  }
  return best;
}

std::string JoinSegments(const std::vector<std::string>& parts) {
  return absl::StrJoin(parts, " ");
}

const DiscourseWindow& Side(const MentionPair& p, Segment s) {
  return s <= Segment::kFirstSuffix ? p.first : p.second;
}

bool SegmentEqual(const MentionPair& a, const MentionPair& b, Segment s) {
  const DiscourseWindow& x = Side(a, s);
  const DiscourseWindow& y = Side(b, s);
  switch (s) {
    case Segment::kFirstPrefix:
    case Segment::kSecondPrefix:
      return x.prefix == y.prefix;
    case Segment::kFirstCenter:
    case Segment::kSecondCenter:
      return x.center == y.center;
    case Segment::kFirstSuffix:
    case Segment::kSecondSuffix:
      return x.suffix == y.suffix;
  }
  return true;
}

// Wraps the calls of one source pair: template rendering, completion, and
// the policy that refusals count as unusable responses.
class Generator {
 public:
  Generator(const MentionPair& source, llm::LlmClient& client,
            const AugmentOptions& options, GenerationStats& stats)
      : source_(source), client_(client), options_(options), stats_(stats) {}

  // nullopt: the response was refused and has been logged.
  absl::StatusOr<std::optional<std::string>> Call(std::string_view tmpl_name,
                                                  const llm::SlotMap& slots) {
    const llm::PromptTemplate* tmpl = llm::FindBuiltinTemplate(tmpl_name);
    if (tmpl == nullptr) {
      return absl::InternalError(
          absl::StrCat("missing template ", AbslSv(tmpl_name)));
    }
    auto r = client_.CompleteTemplate(*tmpl, slots, options_.model,
                                      options_.temperature);
    if (!r.ok()) {
      if (!llm::IsRefusal(r.status())) return r.status();
      Warn(absl::StrCat(AbslSv(tmpl_name), " refused: ", r.status().message()));
      return std::optional<std::string>();
    }
    return std::optional<std::string>(*std::move(r));
  }

  // Candidate mention sentences for the branch's target window.
  absl::StatusOr<std::vector<Candidate>> Candidates(AugmentKind kind) {
    const bool coref = source_.label == PairLabel::kCoref;
    const DiscourseWindow& target = coref ? source_.first : source_.second;
    const std::string trigger(target.trigger());
    llm::SlotMap slots = {{"trigger", trigger}, {"sentence", target.center}};
    std::vector<Candidate> out;
    if (kind == AugmentKind::kTia) {
      ECR_ASSIGN_OR_RETURN(std::optional<std::string> raw,
                           Call(coref ? "nce" : "ce", slots));
      if (!raw) return out;
      auto sentences = llm::ParseMentionList(*raw);
      if (!sentences.ok()) {
        ++stats_.dropped_parse;
        Warn(StdSv(sentences.status().message()));
        return out;
      }
      stats_.candidates += static_cast<int64_t>(sentences->size());
      for (std::string& s : *sentences) {
        const size_t pos = s.find(trigger);
        if (pos == std::string::npos) {
          ++stats_.dropped_constraint;
          continue;
        }
        Candidate c;
        c.sentence = std::move(s);
        c.trigger_begin = pos;
        c.trigger_end = pos + trigger.size();
        c.trigger = trigger;
        c.head_lemma = target.head_lemma;
        out.push_back(std::move(c));
      }
      return out;
    }
    ECR_ASSIGN_OR_RETURN(std::optional<std::string> raw,
                         Call(coref ? "syn_nce" : "syn_ce", slots));
    if (!raw) return out;
    auto bundle = llm::ParseGeneration(*raw);
    if (!bundle.ok()) {
      ++stats_.dropped_parse;
      Warn(StdSv(bundle.status().message()));
      return out;
    }
    stats_.candidates += static_cast<int64_t>(bundle->mention_sentences.size());
    for (const std::string& s : bundle->mention_sentences) {
      auto c = MatchSynonym(s, bundle->synonyms);
      if (!c) {
        ++stats_.dropped_constraint;
        continue;
      }
      out.push_back(*std::move(c));
    }
    return out;
  }

  // Paraphrased prefix/suffix variants of `w`; nullopt when unusable.
  // Empty segments are not sent to the model.
  absl::StatusOr<std::optional<llm::ContextVariants>> Paraphrase(
      const DiscourseWindow& w) {
    if (w.prefix.empty() && w.suffix.empty()) {
      return std::optional<llm::ContextVariants>(llm::ContextVariants{});
    }
    llm::SlotMap slots = {{"snippet", w.Text()},
                          {"prefix", JoinSegments(w.prefix)},
                          {"mention", w.center},
                          {"suffix", JoinSegments(w.suffix)}};
    ECR_ASSIGN_OR_RETURN(std::optional<std::string> raw, Call("para", slots));
    if (!raw) return std::optional<llm::ContextVariants>();
    auto v = llm::ParseParaphrases(*raw, !w.prefix.empty(), !w.suffix.empty());
    if (!v.ok()) {
      Warn(StdSv(v.status().message()));
      return std::optional<llm::ContextVariants>();
    }
    if (w.prefix.empty()) v->prefixes.clear();
    if (w.suffix.empty()) v->suffixes.clear();
    return std::optional<llm::ContextVariants>(*std::move(v));
  }

  // Temporal-commonsense prefix/suffix variants around `sentence`.
  absl::StatusOr<std::optional<llm::ContextVariants>> Temporal(
      const std::string& sentence, const std::string& trigger) {
    const llm::SlotMap slots = {{"sentence", sentence}, {"trigger", trigger}};
    ECR_ASSIGN_OR_RETURN(std::optional<std::string> raw, Call("tc", slots));
    if (!raw) return std::optional<llm::ContextVariants>();
    auto v = llm::ParseParaphrases(*raw);
    if (!v.ok()) {
      Warn(StdSv(v.status().message()));
      return std::optional<llm::ContextVariants>();
    }
    return std::optional<llm::ContextVariants>(*std::move(v));
  }

  void Warn(std::string_view what) {
    stats_.warnings.push_back(
        absl::StrCat("pair ", source_.pair_id, ": ", AbslSv(what)));
  }

 private:
  const MentionPair& source_;
  llm::LlmClient& client_;
  const AugmentOptions& options_;
  GenerationStats& stats_;
};

std::vector<std::string> Pick(const std::vector<std::string>& variants,
                              size_t i) {
  if (variants.empty()) return {};
  return {variants[i % variants.size()]};
}

DiscourseWindow WithCenter(const DiscourseWindow& base, const Candidate& c,
                           std::string mention_id) {
  DiscourseWindow w = base;
  w.mention_id = std::move(mention_id);
  w.center = c.sentence;
  w.trigger_begin = c.trigger_begin;
  w.trigger_end = c.trigger_end;
  w.head_lemma = c.head_lemma;
  return w;
}

}  // namespace

std::string_view AugmentKindName(AugmentKind kind) {
  switch (kind) {
    case AugmentKind::kCad:
      return "cad";
    case AugmentKind::kTia:
      return "tia";
    case AugmentKind::kCia:
      return "cia";
    case AugmentKind::kTad:
      return "tad";
  }
  return "?";
}

absl::StatusOr<AugmentKind> ParseAugmentKind(std::string_view name) {
  const std::string lower = ToLowerAscii(name);
  for (AugmentKind k : {AugmentKind::kCad, AugmentKind::kTia, AugmentKind::kCia,
                        AugmentKind::kTad}) {
    if (lower == AugmentKindName(k)) return k;
  }
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown augmentation kind \"", AbslSv(name), "\" (cad|tia|cia|tad)"));
}

std::string_view SegmentName(Segment segment) {
  switch (segment) {
    case Segment::kFirstPrefix:
      return "first.prefix";
    case Segment::kFirstCenter:
      return "first.center";
    case Segment::kFirstSuffix:
      return "first.suffix";
    case Segment::kSecondPrefix:
      return "second.prefix";
    case Segment::kSecondCenter:
      return "second.center";
    case Segment::kSecondSuffix:
      return "second.suffix";
  }
  return "?";
}

absl::StatusOr<Segment> ParseSegment(std::string_view name) {
  for (Segment s : kAllSegments) {
    if (name == SegmentName(s)) return s;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown segment \"", AbslSv(name), "\""));
}

bool AugmentedPair::Modified(Segment segment) const {
  return std::any_of(edit_ledger.begin(), edit_ledger.end(),
                     [segment](const EditRecord& r) {
                       return r.segment == segment;
                     });
}

json AugmentedPair::ToJson() const {
  json j = pair.ToJson();
  j["kind"] = std::string(AugmentKindName(kind));
  j["source_pair_id"] = source_pair_id;
  json ledger = json::array();
  for (const EditRecord& r : edit_ledger) {
    ledger.push_back({{"segment", std::string(SegmentName(r.segment))},
                      {"action", r.action}});
  }
  j["edit_ledger"] = std::move(ledger);
  j["plausibility"] = plausibility;
  return j;
}

absl::StatusOr<AugmentedPair> AugmentedPair::FromJson(const json& j) {
  auto pair = MentionPair::FromJson(j);
  if (!pair.ok()) return pair.status();
  if (!j.contains("kind") || !j["kind"].is_string() ||
      !j.contains("source_pair_id") || !j["source_pair_id"].is_string() ||
      !j.contains("edit_ledger") || !j["edit_ledger"].is_array() ||
      !j.contains("plausibility") || !j["plausibility"].is_number()) {
    return absl::InvalidArgumentError(
        "augmented pair needs kind, source_pair_id, edit_ledger, "
        "plausibility");
  }
  AugmentedPair a;
  a.pair = *std::move(pair);
  auto kind = ParseAugmentKind(j["kind"].get<std::string>());
  if (!kind.ok()) return kind.status();
  a.kind = *kind;
  a.source_pair_id = j["source_pair_id"].get<std::string>();
  for (const json& r : j["edit_ledger"]) {
    if (!r.is_object() || !r.contains("segment") || !r["segment"].is_string()) {
      return absl::InvalidArgumentError("edit_ledger entry needs a segment");
    }
    auto seg = ParseSegment(r["segment"].get<std::string>());
    if (!seg.ok()) return seg.status();
    a.edit_ledger.push_back({*seg, r.value("action", "")});
  }
  a.plausibility = j["plausibility"].get<double>();
  return a;
}

std::string SerializeAugmented(const std::vector<AugmentedPair>& pairs) {
  std::string out;
  for (const AugmentedPair& p : pairs) absl::StrAppend(&out, p.ToJson().dump(), "\n");
  return out;
}

absl::StatusOr<std::vector<AugmentedPair>> ParseAugmented(
    std::string_view jsonl) {
  std::vector<AugmentedPair> out;
  size_t line_no = 0;
  for (std::string_view line : SplitSv(jsonl, '\n')) {
    ++line_no;
    if (StripWhitespace(line).empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": not JSON"));
    }
    auto a = AugmentedPair::FromJson(j);
    if (!a.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": ", a.status().message()));
    }
    out.push_back(*std::move(a));
  }
  return out;
}

std::string DumpPair(const MentionPair& pair) {
  return absl::StrCat("<s>", pair.first.Text(), "</s>\n<s>",
                      pair.second.Text(), "</s>\n");
}

double PlausibilityProxy(const MentionPair& source, const MentionPair& aug) {
  std::vector<std::string> a = source.first.Tokens();
  for (std::string& t : source.second.Tokens()) a.push_back(std::move(t));
  std::vector<std::string> b = aug.first.Tokens();
  for (std::string& t : aug.second.Tokens()) b.push_back(std::move(t));
  const size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  std::vector<size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), size_t{0});
  for (size_t i = 1; i <= a.size(); ++i) {
    size_t diag = row[0];
    row[0] = i;
    for (size_t j = 1; j <= b.size(); ++j) {
      const size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1,
                         diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return 1.0 - static_cast<double>(row[b.size()]) /
                   static_cast<double>(longest);
}

void GenerationStats::Merge(const GenerationStats& other) {
  candidates += other.candidates;
  dropped_parse += other.dropped_parse;
  dropped_constraint += other.dropped_constraint;
  warnings.insert(warnings.end(), other.warnings.begin(), other.warnings.end());
}

absl::StatusOr<GenerationResult> GenerateAugmentations(
    AugmentKind kind, const MentionPair& source, llm::LlmClient& client,
    const AugmentOptions& options) {
  GenerationResult result;
  Generator gen(source, client, options, result.stats);
  const bool coref = source.label == PairLabel::kCoref;

  auto candidates = gen.Candidates(kind);
  if (!candidates.ok()) return candidates.status();
  if (candidates->empty()) {
    gen.Warn("no surviving candidates");
    return result;
  }
  const auto n = static_cast<int64_t>(candidates->size());

  // Context variants shared by all candidates of this source.
  std::optional<llm::ContextVariants> first_ctx;
  std::optional<llm::ContextVariants> second_ctx;
  const bool needs_first_para =
      kind == AugmentKind::kCia ||
      (!coref && (kind == AugmentKind::kCad || kind == AugmentKind::kTia));
  if (needs_first_para) {
    // The not_coref branch rebuilds the first window around the second
    // window's context.
    auto ctx = gen.Paraphrase(coref ? source.first : source.second);
    if (!ctx.ok()) return ctx.status();
    first_ctx = *std::move(ctx);
    if (!first_ctx) {
      result.stats.dropped_parse += n;
      gen.Warn("paraphrase unusable; all candidates dropped");
      return result;
    }
  }
  if (kind == AugmentKind::kCia) {
    auto ctx = gen.Paraphrase(source.second);
    if (!ctx.ok()) return ctx.status();
    second_ctx = *std::move(ctx);
  } else if (kind == AugmentKind::kTad) {
    auto ctx = gen.Temporal(source.second.center,
                            std::string(source.second.trigger()));
    if (!ctx.ok()) return ctx.status();
    second_ctx = *std::move(ctx);
  }
  if ((kind == AugmentKind::kCia || kind == AugmentKind::kTad) && !second_ctx) {
    result.stats.dropped_parse += n;
    gen.Warn("second-window context unusable; all candidates dropped");
    return result;
  }

  const std::string tag(AugmentKindName(kind));
  for (size_t i = 0; i < candidates->size(); ++i) {
    const Candidate& c = (*candidates)[i];
    const std::string suffix = absl::StrCat("#", tag, i);
    MentionPair out;
    out.pair_id = source.pair_id + suffix;
    out.label = Flip(source.label);
    out.rank = source.rank;
    out.first = WithCenter(source.first, c, source.first.mention_id + suffix);
    out.second = source.second;

    if (first_ctx) {
      out.first.prefix = Pick(first_ctx->prefixes, i);
      out.first.suffix = Pick(first_ctx->suffixes, i);
    }
    if (kind == AugmentKind::kTad) {
      auto ctx = gen.Temporal(c.sentence, c.trigger);
      if (!ctx.ok()) return ctx.status();
      if (!*ctx) {
        ++result.stats.dropped_parse;
        continue;
      }
      out.first.prefix = Pick((*ctx)->prefixes, i);
      out.first.suffix = Pick((*ctx)->suffixes, i);
    }
    if (second_ctx) {
      out.second.prefix = Pick(second_ctx->prefixes, i);
      out.second.suffix = Pick(second_ctx->suffixes, i);
    }

    AugmentedPair a;
    a.kind = kind;
    a.source_pair_id = source.pair_id;
    for (Segment s : kAllSegments) {
      if (SegmentEqual(source, out, s)) continue;
      const bool center =
          s == Segment::kFirstCenter || s == Segment::kSecondCenter;
      a.edit_ledger.push_back(
          {s, center ? "generate"
                     : (kind == AugmentKind::kTad ? "temporal" : "paraphrase")});
    }
    a.plausibility = options.plausibility ? options.plausibility(source, out)
                                          : PlausibilityProxy(source, out);
    a.pair = std::move(out);
    result.pairs.push_back(std::move(a));
  }
  return result;
}

absl::StatusOr<GenerationResult> GenerateForDataset(
    AugmentKind kind, const std::vector<MentionPair>& sources,
    llm::LlmClient& client, const AugmentOptions& options, int threads) {
  std::vector<std::optional<absl::StatusOr<GenerationResult>>> slots(
      sources.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next.fetch_add(1); i < sources.size();
         i = next.fetch_add(1)) {
      slots[i] = GenerateAugmentations(kind, sources[i], client, options);
    }
  };
  const int n = std::max(1, std::min<int>(threads, sources.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  GenerationResult merged;
  for (auto& r : slots) {
    if (!r->ok()) return r->status();
    GenerationResult& one = **r;
    merged.stats.Merge(one.stats);
    for (AugmentedPair& p : one.pairs) merged.pairs.push_back(std::move(p));
  }
  return merged;
}

absl::StatusOr<AugmentationPlan> AugmentationPlan::Create(int per_original,
                                                         int top_n,
                                                         uint64_t seed) {
  if (per_original < 1) {
    return absl::InvalidArgumentError("per_original must be >= 1");
  }
  if (top_n < 1) return absl::InvalidArgumentError("top_n must be >= 1");
  AugmentationPlan plan;
  plan.per_original = per_original;
  plan.top_n = top_n;
  plan.seed = seed;
  return plan;
}

bool IsEligible(const MentionPair& source, const AugmentationPlan& plan) {
  // Rank 0 marks a pair built outside retrieval; it is always eligible.
  return source.rank <= plan.top_n;
}

absl::StatusOr<MixResult> MixDataset(const PairDataset& ori,
                                     const std::vector<AugmentedPair>& augs,
                                     const AugmentationPlan& plan) {
  std::map<std::string_view, size_t> index;
  for (size_t i = 0; i < ori.pairs.size(); ++i) {
    index.emplace(ori.pairs[i].pair_id, i);
  }
  std::vector<std::vector<size_t>> by_source(ori.pairs.size());
  for (size_t k = 0; k < augs.size(); ++k) {
    auto it = index.find(augs[k].source_pair_id);
    if (it == index.end()) {
      return absl::InvalidArgumentError(
          absl::StrCat("augmentation ", augs[k].pair.pair_id,
                       " names unknown source ", augs[k].source_pair_id));
    }
    by_source[it->second].push_back(k);
  }
  MixResult out;
  out.dataset = ori;
  std::mt19937_64 rng(plan.seed);
  const auto cap = static_cast<size_t>(plan.per_original);
  for (size_t i = 0; i < ori.pairs.size(); ++i) {
    std::vector<size_t>& ks = by_source[i];
    if (ks.empty() || !IsEligible(ori.pairs[i], plan)) continue;
    if (ks.size() > cap) {
      std::shuffle(ks.begin(), ks.end(), rng);
      ks.resize(cap);
      std::sort(ks.begin(), ks.end());
    }
    for (size_t k : ks) {
      out.chosen.push_back(augs[k]);
      out.dataset.pairs.push_back(augs[k].pair);
    }
  }
  if (absl::Status st = CheckPairIdsUnique(out.dataset.pairs); !st.ok()) {
    return st;
  }
  return out;
}

}  // namespace ecr
