// Copyright 2026 The ckdctx Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ckdctx/qa/answerer.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "ckdctx/common/error.h"
#include "ckdctx/qa/text.h"

namespace ckdctx::qa {

LexicalAnswerer::LexicalAnswerer(std::vector<Passage> passages,
                                 LexicalOptions options)
    : passages_(std::move(passages)), options_(std::move(options)) {
  if (passages_.empty()) {
    throw Error(ErrorCode::kInput, "answerer needs at least one passage");
  }
  std::set<std::string> ids;
  for (const Passage& p : passages_) {
    if (!ids.insert(p.id).second) {
      throw Error(ErrorCode::kInput, "duplicate passage id '" + p.id + "'");
    }
  }
  // Index in id order so insertion order cannot leak into scores.
  std::sort(passages_.begin(), passages_.end(),
            [](const Passage& a, const Passage& b) { return a.id < b.id; });
  double total_length = 0.0;
  for (const Passage& p : passages_) {
    Indexed entry;
    for (const std::string& token : Tokenize(p.text)) {
      ++entry.term_counts[token];
      entry.length += 1.0;
    }
    for (const auto& [term, count] : entry.term_counts) {
      ++document_frequency_[term];
    }
    total_length += entry.length;
    index_.push_back(std::move(entry));
  }
  average_length_ = total_length / static_cast<double>(passages_.size());
}

std::vector<RankedAnswer> LexicalAnswerer::Ask(std::string_view question,
                                               std::size_t k) const {
  const std::vector<std::string> tokens = Tokenize(question);
  if (tokens.empty()) {
    throw Error(ErrorCode::kQuery, "question has no searchable terms",
                "question");
  }
  const std::set<std::string> terms(tokens.begin(), tokens.end());
  const std::vector<NumericConstraint> constraints =
      ParseNumericPhrases(question);
  const double n = static_cast<double>(passages_.size());

  std::vector<RankedAnswer> answers;
  for (std::size_t i = 0; i < passages_.size(); ++i) {
    const Indexed& doc = index_[i];
    RankedAnswer answer;
    answer.rec_id = passages_[i].id;
    answer.answer_text = passages_[i].text;
    for (const std::string& term : terms) {
      auto tf_it = doc.term_counts.find(term);
      if (tf_it == doc.term_counts.end()) continue;
      const double df = document_frequency_.at(term);
      const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
      const double tf = tf_it->second;
      const double norm =
          options_.k1 *
          (1.0 - options_.b + options_.b * doc.length / average_length_);
      answer.lexical_score += idf * tf * (options_.k1 + 1.0) / (tf + norm);
    }
    int satisfied = 0;
    for (const NumericConstraint& q : constraints) {
      for (const NumericConstraint& a : passages_[i].constraints) {
        if (ConstraintSatisfied(q, a, options_.aliases)) {
          answer.matched_constraints.push_back({q, a});
          ++satisfied;
          break;
        }
      }
    }
    answer.numeric_bonus = options_.beta * satisfied;
    answers.push_back(std::move(answer));
  }
  std::stable_sort(answers.begin(), answers.end(),
                   [](const RankedAnswer& a, const RankedAnswer& b) {
                     if (a.total() != b.total()) return a.total() > b.total();
                     return a.rec_id < b.rec_id;
                   });
  if (answers.size() > k) answers.resize(k);
  return answers;
}

Json ToJson(const RankedAnswer& answer) {
  Json matches = Json::array();
  for (const ConstraintMatch& m : answer.matched_constraints) {
    matches.push_back({{"question", ToJson(m.question)},
                       {"answer", ToJson(m.answer)},
                       {"display", MatchDisplay(m.question, m.answer)}});
  }
  return {{"rec_id", answer.rec_id},
          {"answer_text", answer.answer_text},
          {"lexical_score", answer.lexical_score},
          {"numeric_bonus", answer.numeric_bonus},
          {"total", answer.total()},
          {"matched_constraints", std::move(matches)}};
}

Json ToJson(const std::vector<RankedAnswer>& answers) {
  Json out = Json::array();
  for (const RankedAnswer& a : answers) out.push_back(ToJson(a));
  return out;
}

}  // namespace ckdctx::qa
