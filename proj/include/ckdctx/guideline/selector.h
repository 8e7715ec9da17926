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

#ifndef CKDCTX_GUIDELINE_SELECTOR_H_
#define CKDCTX_GUIDELINE_SELECTOR_H_

#include <string>
#include <string_view>
#include <vector>

#include "ckdctx/guideline/html.h"

namespace ckdctx::guideline {

// A small CSS selector subset: type, `*`, `.class`, `#id`, `[attr]`,
// `[attr=value]`, descendant (space) and child (`>`) combinators, and
// comma-separated alternatives.
class Selector {
 public:
  Selector() = default;
  // Throws kConfig on syntax errors.
  static Selector Parse(std::string_view text);

  bool empty() const { return alternatives_.empty(); }
  const std::string& text() const { return text_; }

  bool Matches(const Node& node) const;
  // Matching descendants of `scope` (excluding `scope`), in document order.
  std::vector<const Node*> SelectAll(const Node& scope) const;
  const Node* SelectFirst(const Node& scope) const;

 private:
  struct AttributeTest {
    std::string name;
    std::string value;
    bool has_value = false;
  };
  struct Compound {
    std::string tag;  // empty matches any element
    std::vector<std::string> classes;
    std::string id;
    std::vector<AttributeTest> attributes;
    bool child_of_previous = false;  // combinator linking to the left part
  };
  using Complex = std::vector<Compound>;

  static bool MatchesCompound(const Compound& c, const Node& node);
  static bool MatchesComplex(const Complex& parts, std::size_t last,
                             const Node& node);

  std::string text_;
  std::vector<Complex> alternatives_;
};

}  // namespace ckdctx::guideline

#endif  // CKDCTX_GUIDELINE_SELECTOR_H_
