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

#include "ecr/llm/prompt.h"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <map>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "ecr/strings.h"

namespace ecr::llm {
namespace {

// Placeholders are {name} with name in [a-z_]; any other brace is literal.
struct Placeholder {
  size_t begin;  // offset of '{'
  size_t end;    // one past '}'
  std::string_view name;
};

std::vector<Placeholder> FindPlaceholders(std::string_view body) {
  std::vector<Placeholder> out;
  size_t i = 0;
  while ((i = body.find('{', i)) != std::string_view::npos) {
    size_t j = i + 1;
    while (j < body.size() && (std::islower(static_cast<unsigned char>(
                                   body[j])) || body[j] == '_')) {
      ++j;
    }
    if (j > i + 1 && j < body.size() && body[j] == '}') {
      out.push_back({i, j + 1, body.substr(i + 1, j - i - 1)});
      i = j + 1;
    } else {
      ++i;
    }
  }
  return out;
}

constexpr char kSynNceDemo[] =
    "Please perform a two-step task based on commonsense inference.\n"
    "Step1: Can you give me five similar expressions for the given word "
    "extracted from a sentence? Given word: 'fire' from 'A man has been "
    "charged on suspicion of arson following a fire that devastated a "
    "Somerset supermarket.' Please show all expressions here.\n"
    "Step2: Try to use each expression in Step1 as the event head lemma to "
    "generate event mention not coreferential to the event induced by the "
    "event head lemma 'fire' in the given text: 'A man has been charged on "
    "suspicion of arson following a fire that devastated a Somerset "
    "supermarket.' Noting that, the human participants, non-human "
    "participants, times and locations in generated event mention content "
    "should be not coreferential to and different from those in the given "
    "text, keeping the sentence structure same as the given text as "
    "possible.\n"
    "Expressions: blaze, inferno, conflagration, flames, combustion\n"
    "Event mentions:\n"
    "1. A woman has been charged with arson after a blaze at the local "
    "library in Bristol.\n"
    "2. A teenager has been charged with arson after an inferno at the "
    "shopping mall in Birmingham.\n"
    "3. A basketball athlete has been charged with arson after a "
    "conflagration at the historic museum in York.\n"
    "...";

constexpr char kSynNceBody[] =
    "Please perform a two-step task based on commonsense inference.\n"
    "Step1: Can you give me five similar expressions for the given word "
    "extracted from a sentence? Given word: '{trigger}' from '{sentence}' "
    "Please show all expressions here.\n"
    "Step2: Try to use each expression in Step1 as the event head lemma to "
    "generate event mention not coreferential to the event induced by the "
    "event head lemma '{trigger}' in the given text: '{sentence}' Noting "
    "that, the human participants, non-human participants, times and "
    "locations in generated event mention content should be not "
    "coreferential to and different from those in the given text, keeping "
    "the sentence structure same as the given text as possible.";

constexpr char kSynCeDemo[] =
    "Please perform a two-step task based on commonsense inference.\n"
    "Step1: Can you give me five similar expressions for the given word "
    "extracted from a sentence? Given word: 'free throw' from 'McDermott "
    "broke Rodney Buford's school scoring record of 2,116 points with a free "
    "throw with 4:43 to play in the first half.' Please show all expressions "
    "here.\n"
    "Step2: Try to use each expression in Step1 as the event head lemma to "
    "generate event mention coreferential to the event induced by the event "
    "head lemma 'free throw' in the given text: 'McDermott broke Rodney "
    "Buford's school scoring record of 2,116 points with a free throw with "
    "4:43 to play in the first half.' Noting that, the human participants, "
    "non-human participants, times and locations in generated event mention "
    "content should be coreferential to those in the given text, but the "
    "sentence structure can be different from the given text.\n"
    "Expressions: basketball shot, scoring toss, uncontested shot, charity "
    "toss, foul shot\n"
    "Event mentions:\n"
    "1. McDermott broke Rodney Buford's school scoring record of 2,116 "
    "points with a basketball shot at 4:43 remaining in the first half.\n"
    "2. McDermott surpassed Rodney Buford's school scoring record of 2,116 "
    "points with a scoring toss in the first half with 4:43 left on the "
    "clock.\n"
    "3. McDermott set a new school scoring record of 2,116 points with an "
    "uncontested shot during the first half with 4:43 remaining.\n"
    "...";

constexpr char kSynCeBody[] =
    "Please perform a two-step task based on commonsense inference.\n"
    "Step1: Can you give me five similar expressions for the given word "
    "extracted from a sentence? Given word: '{trigger}' from '{sentence}' "
    "Please show all expressions here.\n"
    "Step2: Try to use each expression in Step1 as the event head lemma to "
    "generate event mention coreferential to the event induced by the event "
    "head lemma '{trigger}' in the given text: '{sentence}' Noting that, the "
    "human participants, non-human participants, times and locations in "
    "generated event mention content should be coreferential to those in the "
    "given text, but the sentence structure can be different from the given "
    "text.";

constexpr char kNceDemo[] =
    "Please use the given word 'fire' as the event head lemma to generate "
    "event mentions not coreferential to the event induced by the event head "
    "lemma 'fire' in the given text: 'A man has been charged on suspicion of "
    "arson following a fire that devastated a Somerset supermarket.' Noting "
    "that, the human participants, non-human participants, times and "
    "locations in generated event mention content should be not "
    "coreferential to and different from those in the given text, keeping "
    "the word 'fire' and the sentence structure same as the given text as "
    "possible.\n"
    "Event mentions:\n"
    "1. A woman has been charged with arson after a fire at the local "
    "library in Bristol.\n"
    "2. A teenager has been charged with arson after a fire at the shopping "
    "mall in Birmingham.\n"
    "3. A basketball athlete has been charged with arson after a fire at the "
    "historic museum in York.\n"
    "...";

constexpr char kNceBody[] =
    "Please use the given word '{trigger}' as the event head lemma to "
    "generate event mentions not coreferential to the event induced by the "
    "event head lemma '{trigger}' in the given text: '{sentence}' Noting "
    "that, the human participants, non-human participants, times and "
    "locations in generated event mention content should be not "
    "coreferential to and different from those in the given text, keeping "
    "the word '{trigger}' and the sentence structure same as the given text "
    "as possible.";

constexpr char kCeDemo[] =
    "Please use the given word 'free throw' as the event head lemma to "
    "generate event mentions coreferential to the event induced by the event "
    "head lemma 'free throw' in the given text: 'McDermott broke Rodney "
    "Buford's school scoring record of 2,116 points with a free throw with "
    "4:43 to play in the first half.' Noting that, the human participants, "
    "non-human participants, times and locations in generated event mention "
    "content should be coreferential to those in the given text, keeping the "
    "word 'free throw' while the sentence structure can be different from "
    "the given text.\n"
    "Event mentions:\n"
    "1. McDermott broke Rodney Buford's school scoring record of 2,116 "
    "points with a free throw at 4:43 remaining in the first half.\n"
    "2. McDermott surpassed Rodney Buford's school scoring record of 2,116 "
    "points with a free throw in the first half with 4:43 left on the "
    "clock.\n"
    "...";

constexpr char kCeBody[] =
    "Please use the given word '{trigger}' as the event head lemma to "
    "generate event mentions coreferential to the event induced by the event "
    "head lemma '{trigger}' in the given text: '{sentence}' Noting that, the "
    "human participants, non-human participants, times and locations in "
    "generated event mention content should be coreferential to those in the "
    "given text, keeping the word '{trigger}' while the sentence structure "
    "can be different from the given text.";

constexpr char kParaDemo[] =
    "We have a snippet of text: 'Indianapolis Colts clinch playoff berth "
    "with win over Kansas City Chiefs December 23, 2012. Going into week 16, "
    "the Indianapolis Colts controlled their own destiny of making it to "
    "post-season play. The Colts could clinch a playoff berth with a win "
    "over the Kansas City Chiefs or a Pittsburgh Steelers loss. As they have "
    "done all season, the Colts refused to let their fate be decided by "
    "anyone other than themselves. The young team fought hard to defeat the "
    "Chiefs in another fourth quarter victory, 20-13. Although they started "
    "the game with a three-and-out, the Colts were able to light up the "
    "scoreboard first.'\n"
    "The text can be divided into prefix, mention and suffix as following:\n"
    "Prefix: 'Indianapolis Colts clinch playoff berth with win over Kansas "
    "City Chiefs December 23, 2012. Going into week 16, the Indianapolis "
    "Colts controlled their own destiny of making it to post-season play.'\n"
    "Mention: 'The Colts could clinch a playoff berth with a win over the "
    "Kansas City Chiefs or a Pittsburgh Steelers loss.'\n"
    "Suffix: 'As they have done all season, the Colts refused to let their "
    "fate be decided by anyone other than themselves. The young team fought "
    "hard to defeat the Chiefs in another fourth quarter victory, 20-13. "
    "Although they started the game with a three-and-out, the Colts were "
    "able to light up the scoreboard first.'\n"
    "Can you paraphrase Prefix and Suffix in five different ways, where "
    "human participants, non-human participants, times, locations and "
    "actions in generated examples are coreferential to those in the "
    "original one?\n"
    "Prefix:\n"
    "1. The Indianapolis Colts secured a spot in the playoffs by defeating "
    "the Kansas City Chiefs on December 23, 2012, in week 16 of the season. "
    "The Colts had control of their own destiny and could have also clinched "
    "a playoff berth with a Pittsburgh Steelers loss.\n"
    "2. On December 23, 2012, the Indianapolis Colts earned a playoff spot "
    "by winning against the Kansas City Chiefs in week 16. The Colts had the "
    "power to determine their own fate and could have also secured a playoff "
    "berth if the Pittsburgh Steelers lost.\n"
    "...\n"
    "Suffix:\n"
    "1. Throughout the season, the Indianapolis Colts refused to let anyone "
    "else decide their fate. In another fourth-quarter victory, the young "
    "team fought hard to defeat the Kansas City Chiefs with a score of "
    "20-13, despite starting the game with a three-and-out.\n"
    "2. The Indianapolis Colts demonstrated their determination to control "
    "their own destiny throughout the season. They fought hard to secure "
    "another fourth-quarter victory against the Kansas City Chiefs, winning "
    "20-13, despite starting the game with a three-and-out.\n"
    "...";

constexpr char kParaBody[] =
    "We have a snippet of text: '{snippet}'\n"
    "The text can be divided into prefix, mention and suffix as following:\n"
    "Prefix: '{prefix}'\n"
    "Mention: '{mention}'\n"
    "Suffix: '{suffix}'\n"
    "Can you paraphrase Prefix and Suffix in five different ways, where "
    "human participants, non-human participants, times, locations and "
    "actions in generated examples are coreferential to those in the "
    "original one?";

constexpr char kTcDemo[] =
    "We have a template sentence: 'A publicist says Tara Reid has checked "
    "herself into rehab.' Please generate three Prefixes and Suffixes for "
    "the template sentence. Prefix content should be about what typically "
    "happens before the event head lemma 'checked herself' in the given "
    "template sentence, while Suffix content should be about what typically "
    "happens after the event head lemma 'checked herself' in the given "
    "template sentence. Note: Each generated Prefix or Suffix contains three "
    "sentences.\n"
    "Prefixes:\n"
    "1. 'After a series of public appearances where she appeared to be "
    "under the influence, rumors began to circulate that Tara Reid was "
    "struggling with addiction. Friends and family members reportedly urged "
    "her to seek help and get treatment before things got worse.'\n"
    "2. 'Tara Reid often faces mounting pressure from friends, family, and "
    "inner demons. The weight of her addiction or mental health challenges "
    "becomes increasingly burdensome. Seeking relief and stability, she "
    "reaches a breaking point where seeking professional help is no longer "
    "just an option, but a necessity.'\n"
    "...\n"
    "Suffixes:\n"
    "1. 'Reid's representatives have confirmed that she is taking her "
    "recovery seriously and is committed to staying in rehab for as long as "
    "necessary. She has also expressed gratitude for the support she has "
    "received from fans and loved ones during this difficult time. It is "
    "hoped that with the help of professionals, she will be able to overcome "
    "her addiction and move forward in a positive direction.'\n"
    "2. 'Tara Reid begins a transformative journey towards healing after "
    "checking herself into rehab. She commits herself to a comprehensive "
    "treatment plan tailored to her specific needs. With dedication and the "
    "support of professionals, she embarks on a path of self-discovery, "
    "growth, and sobriety.'\n"
    "...";

constexpr char kTcBody[] =
    "We have a template sentence: '{sentence}' Please generate three "
    "Prefixes and Suffixes for the template sentence. Prefix content should "
    "be about what typically happens before the event head lemma '{trigger}' "
    "in the given template sentence, while Suffix content should be about "
    "what typically happens after the event head lemma '{trigger}' in the "
    "given template sentence. Note: Each generated Prefix or Suffix contains "
    "three sentences.";

PromptTemplate MustCreate(std::string name, std::vector<OperatorKind> ops,
                          std::vector<std::string> slots, std::string demo,
                          std::string body, ResponseFormat format) {
  auto t = PromptTemplate::Create(std::move(name), std::move(ops),
                                  std::move(slots), std::move(demo),
                                  std::move(body), format);
  if (!t.ok()) std::abort();  // shipped templates are static data
  return *std::move(t);
}

const std::map<std::string, PromptTemplate, std::less<>>& Registry() {
  static const auto* registry = [] {
    auto* m = new std::map<std::string, PromptTemplate, std::less<>>;
    using K = OperatorKind;
    using F = ResponseFormat;
    auto add = [m](PromptTemplate t) { m->emplace(t.name(), std::move(t)); };
    add(MustCreate("syn_nce", {K::kSyn, K::kNce}, {"trigger", "sentence"},
                   kSynNceDemo, kSynNceBody, F::kGeneration));
    add(MustCreate("syn_ce", {K::kSyn, K::kCe}, {"trigger", "sentence"},
                   kSynCeDemo, kSynCeBody, F::kGeneration));
    add(MustCreate("nce", {K::kNce}, {"trigger", "sentence"}, kNceDemo,
                   kNceBody, F::kMentionList));
    add(MustCreate("ce", {K::kCe}, {"trigger", "sentence"}, kCeDemo, kCeBody,
                   F::kMentionList));
    add(MustCreate("para", {K::kPara},
                   {"snippet", "prefix", "mention", "suffix"}, kParaDemo,
                   kParaBody, F::kContexts));
    add(MustCreate("tc", {K::kTc}, {"sentence", "trigger"}, kTcDemo, kTcBody,
                   F::kContexts));
    return m;
  }();
  return *registry;
}

}  // namespace

std::string_view OperatorName(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::kSyn:
      return "SYN";
    case OperatorKind::kCe:
      return "CE";
    case OperatorKind::kNce:
      return "NCE";
    case OperatorKind::kPara:
      return "PARA";
    case OperatorKind::kTc:
      return "TC";
  }
  return "?";
}

absl::StatusOr<PromptTemplate> PromptTemplate::Create(
    std::string name, std::vector<OperatorKind> operators,
    std::vector<std::string> slots, std::string demonstration,
    std::string body, ResponseFormat format) {
  if (operators.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("template ", name, " has no operator"));
  }
  std::vector<std::string> sorted = slots;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    return absl::InvalidArgumentError(
        absl::StrCat("template ", name, " declares a slot twice"));
  }
  for (const Placeholder& p : FindPlaceholders(body)) {
    if (!std::binary_search(sorted.begin(), sorted.end(), p.name)) {
      return absl::InvalidArgumentError(
          absl::StrCat("template ", name, " uses undeclared slot \"",
                       AbslSv(p.name), "\""));
    }
  }
  PromptTemplate t;
  t.name_ = std::move(name);
  t.operators_ = std::move(operators);
  t.slots_ = std::move(slots);
  t.demonstration_ = std::move(demonstration);
  t.body_ = std::move(body);
  t.format_ = format;
  return t;
}

absl::StatusOr<std::string> PromptTemplate::Render(const SlotMap& slots) const {
  for (const std::string& s : slots_) {
    if (slots.find(s) == slots.end()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "template ", name_, ": missing slot \"", s, "\""));
    }
  }
  std::string out;
  if (!demonstration_.empty()) absl::StrAppend(&out, demonstration_, "\n\n");
  std::string_view body = body_;
  size_t at = 0;
  for (const Placeholder& p : FindPlaceholders(body)) {
    absl::StrAppend(&out, AbslSv(body.substr(at, p.begin - at)),
                    slots.find(p.name)->second);
    at = p.end;
  }
  absl::StrAppend(&out, AbslSv(body.substr(at)));
  return out;
}

const PromptTemplate* FindBuiltinTemplate(std::string_view name) {
  auto it = Registry().find(name);
  return it == Registry().end() ? nullptr : &it->second;
}

const std::vector<std::string>& BuiltinTemplateNames() {
  static const auto* names = [] {
    auto* v = new std::vector<std::string>;
    for (const auto& [name, t] : Registry()) v->push_back(name);
    return v;
  }();
  return *names;
}

}  // namespace ecr::llm
