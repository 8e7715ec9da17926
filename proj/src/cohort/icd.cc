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

#include "ckdctx/cohort/icd.h"

#include <regex>

namespace ckdctx::cohort {
namespace {

bool GlobMatch(std::string_view pattern, std::string_view text) {
  std::size_t p = 0, t = 0;
  std::size_t star = std::string_view::npos, mark = 0;
  while (t < text.size()) {
    if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == text[t])) {
      ++p;
      ++t;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = t;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      t = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

}  // namespace

bool IsValidIcdCode(std::string_view code) {
  static const std::regex kIcd9(R"(^\d{3}(\.\d{1,2})?$)");
  static const std::regex kIcd9V(R"(^V\d{2}(\.\d{1,2})?$)");
  static const std::regex kIcd9E(R"(^E\d{3}(\.\d)?$)");
  static const std::regex kIcd10(R"(^[A-Z]\d{2}(\.\d{1,4})?$)");
  const std::string s(code);
  return std::regex_match(s, kIcd9) || std::regex_match(s, kIcd9V) ||
         std::regex_match(s, kIcd9E) || std::regex_match(s, kIcd10);
}

CodePattern::CodePattern(std::string text) : text_(std::move(text)) {
  is_glob_ = text_.find_first_of("*?") != std::string::npos;
}

bool CodePattern::Matches(std::string_view code) const {
  if (is_glob_) {
    if (GlobMatch(text_, code)) return true;
    if (text_.size() > 2 && text_.ends_with(".*")) {
      return code == std::string_view(text_).substr(0, text_.size() - 2);
    }
    return false;
  }
  if (code == text_) return true;
  if (!code.starts_with(text_)) return false;
  // Hierarchical descent: "362.0" -> "362.01", "I10" -> "I10.9".
  return text_.find('.') != std::string::npos || code[text_.size()] == '.';
}

int CodePattern::Specificity() const {
  int literal = 0;
  for (char c : text_) {
    if (c != '*' && c != '?') ++literal;
  }
  return literal;
}

std::string CodePattern::Instantiate() const {
  std::string code;
  for (char c : text_) {
    code.push_back(c == '*' || c == '?' ? '9' : c);
  }
  return code;
}

CodePatternSet::CodePatternSet(std::initializer_list<const char*> patterns) {
  for (const char* p : patterns) patterns_.emplace_back(p);
}

CodePatternSet::CodePatternSet(const std::vector<std::string>& patterns) {
  for (const auto& p : patterns) patterns_.emplace_back(p);
}

bool CodePatternSet::Matches(std::string_view code) const {
  for (const auto& p : patterns_) {
    if (p.Matches(code)) return true;
  }
  return false;
}

bool CodePatternSet::MatchesAny(const std::vector<std::string>& codes) const {
  for (const auto& code : codes) {
    if (Matches(code)) return true;
  }
  return false;
}

std::vector<std::string> CodePatternSet::Texts() const {
  std::vector<std::string> out;
  out.reserve(patterns_.size());
  for (const auto& p : patterns_) out.push_back(p.text());
  return out;
}

}  // namespace ckdctx::cohort
