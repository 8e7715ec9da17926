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

#ifndef CKDCTX_QA_NUMERIC_H_
#define CKDCTX_QA_NUMERIC_H_

#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ckdctx/common/json_util.h"

namespace ckdctx::qa {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// An interval on the real line; infinite ends are always open.
struct Interval {
  double lower = -kInf;
  bool lower_closed = false;
  double upper = kInf;
  bool upper_closed = false;

  bool Contains(double x) const;
  bool IsSubsetOf(const Interval& other) const;
  // A finite point inside the interval (midpoint when bounded).
  double Witness() const;

  friend bool operator==(const Interval&, const Interval&) = default;
};

struct UnitForm {
  Interval interval;
  std::string unit;

  friend bool operator==(const UnitForm&, const UnitForm&) = default;
};

struct NumericConstraint {
  std::string quantity;  // normalized token, empty when none was found
  Interval interval;
  std::string unit;  // empty when the number had no unit
  // Bracketed restatements such as "[86 mmol/mol]".
  std::vector<UnitForm> alternates;
  std::size_t span_begin = 0;  // byte offsets into the parsed text
  std::size_t span_end = 0;

  friend bool operator==(const NumericConstraint&,
                         const NumericConstraint&) = default;
};

// Recognizes comparator phrases ("greater than", "at least", ">", "≥", ...)
// and "between X and Y" followed by a number with an optional unit (%,
// mg/dL, mmol/mol, mmol/L). The quantity is the nearest preceding content
// word within five tokens. Unparseable numerics are skipped.
std::vector<NumericConstraint> ParseNumericPhrases(std::string_view text);

// Canonical text that parses back to the same constraint (spans aside).
std::string RenderConstraint(const NumericConstraint& constraint);
// Interval notation such as "(10, ∞)" or "[5, 9]".
std::string IntervalText(const Interval& interval);
// "a1c: (10, ∞) ⊆ (10, ∞)".
std::string MatchDisplay(const NumericConstraint& question,
                         const NumericConstraint& answer);

// Maps quantity spellings onto a canonical name.
class QuantityAliases {
 public:
  QuantityAliases() = default;
  // a1c <-> hba1c, glucose <-> blood glucose.
  static QuantityAliases Default();
  static QuantityAliases FromJson(const Json& json);
  Json ToJson() const;

  void Add(const std::string& alias, const std::string& canonical);
  std::string Canonical(const std::string& quantity) const;

 private:
  std::map<std::string, std::string> canonical_;
};

// True iff the quantities agree (after aliasing) and the question interval
// lies within the answer interval. A question without a unit is compared
// against the answer's primary form; otherwise the answer form with the same
// unit is used, and a unit the answer never states fails.
bool ConstraintSatisfied(const NumericConstraint& question,
                         const NumericConstraint& answer,
                         const QuantityAliases& aliases =
                             QuantityAliases::Default());

Json ToJson(const NumericConstraint& constraint);
NumericConstraint NumericConstraintFromJson(const Json& json,
                                            const std::string& path);

}  // namespace ckdctx::qa

#endif  // CKDCTX_QA_NUMERIC_H_
