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

#include "ckdctx/qa/numeric.h"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <set>

#include "ckdctx/common/error.h"
#include "ckdctx/qa/text.h"

namespace ckdctx::qa {
namespace {

enum class Comparator { kGreater, kGreaterEqual, kLess, kLessEqual };

struct Phrase {
  std::string_view text;  // words separated by single spaces
  Comparator comparator;
};

// Longest phrases first so "greater than or equal to" wins over
// "greater than".
constexpr std::array<Phrase, 14> kPhrases = {{
    {"greater than or equal to", Comparator::kGreaterEqual},
    {"less than or equal to", Comparator::kLessEqual},
    {"greater than", Comparator::kGreater},
    {"less than", Comparator::kLess},
    {"at least", Comparator::kGreaterEqual},
    {"at most", Comparator::kLessEqual},
    {"above", Comparator::kGreater},
    {"below", Comparator::kLess},
    {">=", Comparator::kGreaterEqual},
    {"<=", Comparator::kLessEqual},
    {"\xE2\x89\xA5", Comparator::kGreaterEqual},  // ≥
    {"\xE2\x89\xA4", Comparator::kLessEqual},     // ≤
    {">", Comparator::kGreater},
    {"<", Comparator::kLess},
}};

struct UnitSpelling {
  std::string_view lower;
  std::string_view canonical;
};

constexpr std::array<UnitSpelling, 4> kUnits = {{
    {"mmol/mol", "mmol/mol"},
    {"mmol/l", "mmol/L"},
    {"mg/dl", "mg/dL"},
    {"%", "%"},
}};

// Words that never name a measured quantity.
const std::set<std::string, std::less<>>& GenericWords() {
  static const std::set<std::string, std::less<>> words = {
      "level", "levels", "value", "values", "concentration", "concentrations",
      "reading", "readings", "patient", "patients", "s", "very", "high",
      "low", "remains", "remain"};
  return words;
}

bool IsAlnum(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

bool IsSpace(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::size_t SkipSpace(std::string_view s, std::size_t pos) {
  while (pos < s.size() && IsSpace(s[pos])) ++pos;
  return pos;
}

// Matches `phrase` at `pos` allowing any run of whitespace between words.
// Returns the end offset on success.
std::optional<std::size_t> MatchPhrase(std::string_view lower,
                                       std::size_t pos,
                                       std::string_view phrase) {
  const bool wordy = IsAlnum(phrase.front());
  if (wordy && pos > 0 && IsAlnum(lower[pos - 1])) return std::nullopt;
  std::size_t i = pos;
  std::size_t p = 0;
  while (p < phrase.size()) {
    if (phrase[p] == ' ') {
      if (i >= lower.size() || !IsSpace(lower[i])) return std::nullopt;
      i = SkipSpace(lower, i);
      ++p;
      continue;
    }
    if (i >= lower.size() || lower[i] != phrase[p]) return std::nullopt;
    ++i;
    ++p;
  }
  if (wordy && i < lower.size() && IsAlnum(lower[i])) return std::nullopt;
  return i;
}

std::optional<std::pair<double, std::size_t>> MatchNumber(
    std::string_view s, std::size_t pos) {
  std::size_t i = pos;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (i == pos) return std::nullopt;
  if (i + 1 < s.size() && s[i] == '.' &&
      std::isdigit(static_cast<unsigned char>(s[i + 1]))) {
    ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  }
  // Reject things like "10.1.2" or "9a".
  if (i < s.size() && (std::isalpha(static_cast<unsigned char>(s[i])) ||
                       (s[i] == '.' && i + 1 < s.size() &&
                        std::isdigit(static_cast<unsigned char>(s[i + 1]))))) {
    return std::nullopt;
  }
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + i, value);
  if (ec != std::errc() || ptr != s.data() + i) return std::nullopt;
  return std::make_pair(value, i);
}

// Optional unit after a number; returns (canonical unit, end).
std::pair<std::string, std::size_t> MatchUnit(std::string_view lower,
                                              std::size_t pos) {
  const std::size_t start = SkipSpace(lower, pos);
  for (const UnitSpelling& u : kUnits) {
    if (lower.substr(start, u.lower.size()) != u.lower) continue;
    const std::size_t end = start + u.lower.size();
    if (u.lower != "%" && end < lower.size() && IsAlnum(lower[end])) continue;
    return {std::string(u.canonical), end};
  }
  return {"", pos};
}

Interval MakeInterval(Comparator c, double value) {
  Interval iv;
  switch (c) {
    case Comparator::kGreater:
      iv.lower = value;
      break;
    case Comparator::kGreaterEqual:
      iv.lower = value;
      iv.lower_closed = true;
      break;
    case Comparator::kLess:
      iv.upper = value;
      break;
    case Comparator::kLessEqual:
      iv.upper = value;
      iv.upper_closed = true;
      break;
  }
  return iv;
}

// "[86 mmol/mol]" or "(16.7 mmol/L)" directly after a constraint.
std::optional<std::pair<UnitForm, std::size_t>> MatchRestatement(
    std::string_view lower, std::size_t pos, Comparator c) {
  std::size_t i = SkipSpace(lower, pos);
  if (i >= lower.size() || (lower[i] != '[' && lower[i] != '(')) {
    return std::nullopt;
  }
  const char close = lower[i] == '[' ? ']' : ')';
  i = SkipSpace(lower, i + 1);
  auto number = MatchNumber(lower, i);
  if (!number) return std::nullopt;
  auto [unit, after_unit] = MatchUnit(lower, number->second);
  if (unit.empty()) return std::nullopt;
  i = SkipSpace(lower, after_unit);
  if (i >= lower.size() || lower[i] != close) return std::nullopt;
  return std::make_pair(UnitForm{MakeInterval(c, number->first), unit}, i + 1);
}

struct Word {
  std::string text;
  std::size_t begin;
};

std::vector<Word> WordsBefore(std::string_view lower, std::size_t end) {
  std::vector<Word> words;
  std::size_t i = 0;
  while (i < end) {
    if (!IsAlnum(lower[i])) {
      ++i;
      continue;
    }
    const std::size_t begin = i;
    while (i < end && IsAlnum(lower[i])) ++i;
    words.push_back({std::string(lower.substr(begin, i - begin)), begin});
  }
  return words;
}

bool IsNumeric(const std::string& word) {
  for (char c : word) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

// Nearest preceding content word within five tokens.
std::pair<std::string, std::size_t> FindQuantity(std::string_view lower,
                                                 std::size_t comparator_begin) {
  const std::vector<Word> words = WordsBefore(lower, comparator_begin);
  const std::size_t window = std::min<std::size_t>(5, words.size());
  for (std::size_t k = 0; k < window; ++k) {
    const Word& w = words[words.size() - 1 - k];
    if (IsStopword(w.text) || GenericWords().count(w.text) ||
        IsNumeric(w.text)) {
      continue;
    }
    return {w.text, w.begin};
  }
  return {"", comparator_begin};
}

std::string FormatNumber(double v) { return FormatDouble(v); }

std::string NumberWithUnit(double v, const std::string& unit) {
  if (unit.empty()) return FormatNumber(v);
  if (unit == "%") return FormatNumber(v) + "%";
  return FormatNumber(v) + " " + unit;
}

}  // namespace

bool Interval::Contains(double x) const {
  const bool above = lower_closed ? x >= lower : x > lower;
  const bool below = upper_closed ? x <= upper : x < upper;
  return above && below;
}

bool Interval::IsSubsetOf(const Interval& other) const {
  bool lower_ok;
  if (other.lower == -kInf) {
    lower_ok = true;
  } else if (lower == other.lower) {
    lower_ok = other.lower_closed || !lower_closed;
  } else {
    lower_ok = lower > other.lower;
  }
  bool upper_ok;
  if (other.upper == kInf) {
    upper_ok = true;
  } else if (upper == other.upper) {
    upper_ok = other.upper_closed || !upper_closed;
  } else {
    upper_ok = upper < other.upper;
  }
  return lower_ok && upper_ok;
}

double Interval::Witness() const {
  const bool lo = std::isfinite(lower);
  const bool hi = std::isfinite(upper);
  if (lo && hi) return 0.5 * (lower + upper);
  if (lo) return lower + 1.0;
  if (hi) return upper - 1.0;
  return 0.0;
}

std::vector<NumericConstraint> ParseNumericPhrases(std::string_view text) {
  std::string lower(text);
  for (char& c : lower) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  std::vector<NumericConstraint> out;
  std::size_t pos = 0;
  while (pos < lower.size()) {
    // "between X and Y"
    if (auto after = MatchPhrase(lower, pos, "between")) {
      auto first = MatchNumber(lower, SkipSpace(lower, *after));
      if (first && SkipSpace(lower, *after) > *after) {
        auto [unit1, u1_end] = MatchUnit(lower, first->second);
        auto and_end = MatchPhrase(lower, SkipSpace(lower, u1_end), "and");
        if (and_end && SkipSpace(lower, u1_end) > u1_end) {
          auto second = MatchNumber(lower, SkipSpace(lower, *and_end));
          if (second && first->first <= second->first) {
            auto [unit2, u2_end] = MatchUnit(lower, second->second);
            if (unit1.empty() || unit2.empty() || unit1 == unit2) {
              NumericConstraint c;
              auto [quantity, q_begin] = FindQuantity(lower, pos);
              c.quantity = quantity;
              c.interval = {first->first, true, second->first, true};
              c.unit = unit2.empty() ? unit1 : unit2;
              c.span_begin = q_begin;
              c.span_end = u2_end;
              out.push_back(std::move(c));
              pos = u2_end;
              continue;
            }
          }
        }
      }
    }
    bool matched = false;
    for (const Phrase& phrase : kPhrases) {
      auto after = MatchPhrase(lower, pos, phrase.text);
      if (!after) continue;
      auto number = MatchNumber(lower, SkipSpace(lower, *after));
      if (!number) break;  // comparator without a number; keep scanning
      auto [unit, end] = MatchUnit(lower, number->second);
      NumericConstraint c;
      auto [quantity, q_begin] = FindQuantity(lower, pos);
      c.quantity = quantity;
      c.interval = MakeInterval(phrase.comparator, number->first);
      c.unit = unit;
      while (auto alt = MatchRestatement(lower, end, phrase.comparator)) {
        c.alternates.push_back(alt->first);
        end = alt->second;
      }
      c.span_begin = q_begin;
      c.span_end = end;
      out.push_back(std::move(c));
      pos = end;
      matched = true;
      break;
    }
    if (!matched) ++pos;
  }
  return out;
}

std::string RenderConstraint(const NumericConstraint& c) {
  std::string out = c.quantity.empty() ? "" : c.quantity + " ";
  const Interval& iv = c.interval;
  const bool lo = std::isfinite(iv.lower);
  const bool hi = std::isfinite(iv.upper);
  auto with_alternates = [&](bool use_lower) {
    std::string s;
    for (const UnitForm& alt : c.alternates) {
      s += " [" +
           NumberWithUnit(use_lower ? alt.interval.lower : alt.interval.upper,
                          alt.unit) +
           "]";
    }
    return s;
  };
  if (lo && hi) {
    out += "between " + FormatNumber(iv.lower) + " and " +
           NumberWithUnit(iv.upper, c.unit);
  } else if (lo) {
    out += (iv.lower_closed ? "greater than or equal to " : "greater than ") +
           NumberWithUnit(iv.lower, c.unit) + with_alternates(true);
  } else if (hi) {
    out += (iv.upper_closed ? "less than or equal to " : "less than ") +
           NumberWithUnit(iv.upper, c.unit) + with_alternates(false);
  }
  return out;
}

std::string IntervalText(const Interval& iv) {
  std::string out = iv.lower_closed ? "[" : "(";
  out += std::isfinite(iv.lower) ? FormatNumber(iv.lower) : "-\xE2\x88\x9E";
  out += ", ";
  out += std::isfinite(iv.upper) ? FormatNumber(iv.upper) : "\xE2\x88\x9E";
  out += iv.upper_closed ? "]" : ")";
  return out;
}

std::string MatchDisplay(const NumericConstraint& question,
                         const NumericConstraint& answer) {
  return question.quantity + ": " + IntervalText(question.interval) +
         " \xE2\x8A\x86 " + IntervalText(answer.interval);
}

QuantityAliases QuantityAliases::Default() {
  QuantityAliases aliases;
  aliases.Add("hba1c", "a1c");
  aliases.Add("blood glucose", "glucose");
  return aliases;
}

QuantityAliases QuantityAliases::FromJson(const Json& json) {
  if (!json.is_object()) {
    throw Error(ErrorCode::kConfig, "quantity aliases must be an object",
                "aliases");
  }
  QuantityAliases aliases;
  for (const auto& [alias, canonical] : json.items()) {
    if (!canonical.is_string()) {
      throw Error(ErrorCode::kConfig, "alias target must be a string",
                  "aliases/" + alias);
    }
    aliases.Add(alias, canonical.get<std::string>());
  }
  return aliases;
}

Json QuantityAliases::ToJson() const {
  Json out = Json::object();
  for (const auto& [alias, canonical] : canonical_) out[alias] = canonical;
  return out;
}

void QuantityAliases::Add(const std::string& alias,
                          const std::string& canonical) {
  canonical_[alias] = canonical;
}

std::string QuantityAliases::Canonical(const std::string& quantity) const {
  auto it = canonical_.find(quantity);
  return it == canonical_.end() ? quantity : it->second;
}

bool ConstraintSatisfied(const NumericConstraint& question,
                         const NumericConstraint& answer,
                         const QuantityAliases& aliases) {
  const std::string q = aliases.Canonical(question.quantity);
  if (q.empty() || q != aliases.Canonical(answer.quantity)) return false;
  if (question.unit.empty()) {
    return question.interval.IsSubsetOf(answer.interval);
  }
  if (answer.unit == question.unit) {
    return question.interval.IsSubsetOf(answer.interval);
  }
  for (const UnitForm& alt : answer.alternates) {
    if (alt.unit == question.unit) {
      return question.interval.IsSubsetOf(alt.interval);
    }
  }
  return false;
}

namespace {

Json BoundJson(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json IntervalJson(const Interval& iv) {
  return {{"lower", BoundJson(iv.lower)},
          {"lower_closed", iv.lower_closed},
          {"upper", BoundJson(iv.upper)},
          {"upper_closed", iv.upper_closed}};
}

double BoundFromJson(const Json& obj, const char* key, double infinite,
                     const std::string& path) {
  const Json& v = RequireField(obj, key, path);
  if (v.is_null()) return infinite;
  if (!v.is_number()) {
    throw Error(ErrorCode::kValidation, "bound must be a number or null",
                path + "/" + key);
  }
  return v.get<double>();
}

bool BoolField(const Json& obj, const char* key, const std::string& path) {
  const Json& v = RequireField(obj, key, path);
  if (!v.is_boolean()) {
    throw Error(ErrorCode::kValidation, "expected a boolean",
                path + "/" + key);
  }
  return v.get<bool>();
}

Interval IntervalFromJson(const Json& obj, const std::string& path) {
  Interval iv;
  iv.lower = BoundFromJson(obj, "lower", -kInf, path);
  iv.lower_closed = BoolField(obj, "lower_closed", path);
  iv.upper = BoundFromJson(obj, "upper", kInf, path);
  iv.upper_closed = BoolField(obj, "upper_closed", path);
  if (iv.lower > iv.upper) {
    throw Error(ErrorCode::kValidation, "lower bound exceeds upper bound",
                path);
  }
  return iv;
}

}  // namespace

Json ToJson(const NumericConstraint& c) {
  Json alternates = Json::array();
  for (const UnitForm& alt : c.alternates) {
    alternates.push_back(
        {{"interval", IntervalJson(alt.interval)}, {"unit", alt.unit}});
  }
  return {{"quantity", c.quantity},
          {"interval", IntervalJson(c.interval)},
          {"unit", c.unit},
          {"alternates", std::move(alternates)},
          {"span", {c.span_begin, c.span_end}}};
}

NumericConstraint NumericConstraintFromJson(const Json& json,
                                            const std::string& path) {
  if (!json.is_object()) {
    throw Error(ErrorCode::kValidation, "constraint must be an object", path);
  }
  NumericConstraint c;
  c.quantity = RequireString(json, "quantity", path);
  c.interval = IntervalFromJson(RequireField(json, "interval", path),
                                path + "/interval");
  c.unit = RequireString(json, "unit", path);
  const Json& alternates = RequireArray(json, "alternates", path);
  for (std::size_t i = 0; i < alternates.size(); ++i) {
    const std::string alt_path = path + "/alternates/" + std::to_string(i);
    c.alternates.push_back(
        {IntervalFromJson(RequireField(alternates[i], "interval", alt_path),
                          alt_path + "/interval"),
         RequireString(alternates[i], "unit", alt_path)});
  }
  const Json& span = RequireArray(json, "span", path);
  if (span.size() != 2 || !span[0].is_number_unsigned() ||
      !span[1].is_number_unsigned()) {
    throw Error(ErrorCode::kValidation, "span must be two offsets",
                path + "/span");
  }
  c.span_begin = span[0].get<std::size_t>();
  c.span_end = span[1].get<std::size_t>();
  return c;
}

}  // namespace ckdctx::qa
