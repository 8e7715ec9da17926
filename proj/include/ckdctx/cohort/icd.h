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

#ifndef CKDCTX_COHORT_ICD_H_
#define CKDCTX_COHORT_ICD_H_

#include <string>
#include <string_view>
#include <vector>

namespace ckdctx::cohort {

// True when `code` has ICD-9 (including V and E supplementary codes) or
// ICD-10 syntax. No check against a code table is made.
bool IsValidIcdCode(std::string_view code);

// A diagnosis-code pattern.
//
//   "250.*0"  glob: '*' matches any run of characters, '?' exactly one.
//   "E11.*"   a trailing ".*" also matches the bare category ("E11").
//   "362.0"   a literal matches itself and every code below it in the ICD
//             hierarchy ("362.01"); "I10" matches "I10" and "I10.x".
class CodePattern {
 public:
  explicit CodePattern(std::string text);

  bool Matches(std::string_view code) const;
  const std::string& text() const { return text_; }
  // Number of literal characters; larger means more specific.
  int Specificity() const;
  bool IsGlob() const { return is_glob_; }
  // A concrete code matched by this pattern (wildcards filled with '9').
  std::string Instantiate() const;

  friend bool operator==(const CodePattern&, const CodePattern&) = default;

 private:
  std::string text_;
  bool is_glob_ = false;
};

class CodePatternSet {
 public:
  CodePatternSet() = default;
  CodePatternSet(std::initializer_list<const char*> patterns);
  explicit CodePatternSet(const std::vector<std::string>& patterns);

  bool Matches(std::string_view code) const;
  bool MatchesAny(const std::vector<std::string>& codes) const;
  const std::vector<CodePattern>& patterns() const { return patterns_; }
  std::vector<std::string> Texts() const;

  friend bool operator==(const CodePatternSet&,
                         const CodePatternSet&) = default;

 private:
  std::vector<CodePattern> patterns_;
};

}  // namespace ckdctx::cohort

#endif  // CKDCTX_COHORT_ICD_H_
