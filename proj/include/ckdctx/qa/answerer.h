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

#ifndef CKDCTX_QA_ANSWERER_H_
#define CKDCTX_QA_ANSWERER_H_

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ckdctx/common/json_util.h"
#include "ckdctx/qa/numeric.h"

namespace ckdctx::qa {

// A retrievable unit of text; the whole passage is the answer span.
struct Passage {
  std::string id;
  std::string text;
  std::vector<NumericConstraint> constraints;
};

struct ConstraintMatch {
  NumericConstraint question;
  NumericConstraint answer;

  friend bool operator==(const ConstraintMatch&,
                         const ConstraintMatch&) = default;
};

struct RankedAnswer {
  std::string rec_id;
  std::string answer_text;
  double lexical_score = 0.0;
  double numeric_bonus = 0.0;
  std::vector<ConstraintMatch> matched_constraints;

  double total() const { return lexical_score + numeric_bonus; }

  friend bool operator==(const RankedAnswer&, const RankedAnswer&) = default;
};

class Answerer {
 public:
  virtual ~Answerer() = default;
  // Top-k answers by total score, ties broken by ascending rec_id.
  virtual std::vector<RankedAnswer> Ask(std::string_view question,
                                        std::size_t k) const = 0;
};

struct LexicalOptions {
  double k1 = 1.2;
  double b = 0.75;
  double beta = 2.0;  // bonus per satisfied question constraint
  QuantityAliases aliases = QuantityAliases::Default();
};

// Okapi BM25 over passage tokens plus a numeric-containment bonus.
class LexicalAnswerer : public Answerer {
 public:
  explicit LexicalAnswerer(std::vector<Passage> passages,
                           LexicalOptions options = {});

  std::vector<RankedAnswer> Ask(std::string_view question,
                                std::size_t k) const override;

  std::size_t size() const { return passages_.size(); }

 private:
  struct Indexed {
    std::map<std::string, int> term_counts;
    double length = 0.0;
  };

  std::vector<Passage> passages_;
  std::vector<Indexed> index_;
  std::map<std::string, int> document_frequency_;
  double average_length_ = 0.0;
  LexicalOptions options_;
};

Json ToJson(const RankedAnswer& answer);
Json ToJson(const std::vector<RankedAnswer>& answers);

}  // namespace ckdctx::qa

#endif  // CKDCTX_QA_ANSWERER_H_
