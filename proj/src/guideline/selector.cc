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

#include "ckdctx/guideline/selector.h"

#include <cctype>

#include "ckdctx/common/error.h"

namespace ckdctx::guideline {
namespace {

bool IsIdentChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_';
}

class SelectorParser {
 public:
  explicit SelectorParser(std::string_view text) : text_(text) {}

  [[noreturn]] void Fail(const std::string& what) const {
    throw Error(ErrorCode::kConfig,
                "bad selector '" + std::string(text_) + "': " + what +
                    " at offset " + std::to_string(pos_));
  }

  bool AtEnd() const { return pos_ >= text_.size(); }
  char Peek() const { return AtEnd() ? '\0' : text_[pos_]; }

  bool SkipSpace() {
    const std::size_t start = pos_;
    while (!AtEnd() && std::isspace(static_cast<unsigned char>(Peek()))) ++pos_;
    return pos_ > start;
  }

  std::string Ident() {
    const std::size_t start = pos_;
    while (!AtEnd() && IsIdentChar(Peek())) ++pos_;
    if (pos_ == start) Fail("expected a name");
    std::string out(text_.substr(start, pos_ - start));
    return out;
  }

  std::size_t pos_ = 0;
  std::string_view text_;
};

std::string Lower(std::string s) {
  for (char& c : s) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return s;
}

void Walk(const Node& node, const Selector& selector,
          std::vector<const Node*>& out) {
  for (const auto& child : node.children) {
    if (child->is_text()) continue;
    if (selector.Matches(*child)) out.push_back(child.get());
    Walk(*child, selector, out);
  }
}

}  // namespace

Selector Selector::Parse(std::string_view text) {
  Selector selector;
  selector.text_ = std::string(text);
  SelectorParser p(text);
  p.SkipSpace();
  if (p.AtEnd()) return selector;

  Complex complex;
  bool child_pending = false;
  while (true) {
    p.SkipSpace();
    Compound c;
    c.child_of_previous = child_pending;
    child_pending = false;
    bool any = false;
    if (p.Peek() == '*') {
      ++p.pos_;
      any = true;
    } else if (!p.AtEnd() && IsIdentChar(p.Peek())) {
      c.tag = Lower(p.Ident());
      any = true;
    }
    while (!p.AtEnd()) {
      const char ch = p.Peek();
      if (ch == '.') {
        ++p.pos_;
        c.classes.push_back(p.Ident());
      } else if (ch == '#') {
        ++p.pos_;
        c.id = p.Ident();
      } else if (ch == '[') {
        ++p.pos_;
        p.SkipSpace();
        AttributeTest test;
        test.name = Lower(p.Ident());
        p.SkipSpace();
        if (p.Peek() == '=') {
          ++p.pos_;
          p.SkipSpace();
          test.has_value = true;
          if (p.Peek() == '"' || p.Peek() == '\'') {
            const char quote = p.Peek();
            ++p.pos_;
            const std::size_t end = text.find(quote, p.pos_);
            if (end == std::string_view::npos) p.Fail("unterminated string");
            test.value = std::string(text.substr(p.pos_, end - p.pos_));
            p.pos_ = end + 1;
          } else {
            test.value = p.Ident();
          }
          p.SkipSpace();
        }
        if (p.Peek() != ']') p.Fail("expected ']'");
        ++p.pos_;
        c.attributes.push_back(std::move(test));
      } else {
        break;
      }
      any = true;
    }
    if (!any) p.Fail("expected a simple selector");
    complex.push_back(std::move(c));

    const bool spaced = p.SkipSpace();
    if (p.AtEnd()) break;
    const char ch = p.Peek();
    if (ch == ',') {
      ++p.pos_;
      selector.alternatives_.push_back(std::move(complex));
      complex.clear();
      p.SkipSpace();
      if (p.AtEnd()) p.Fail("trailing ','");
      continue;
    }
    if (ch == '>') {
      ++p.pos_;
      child_pending = true;
      continue;
    }
    if (!spaced) p.Fail("unexpected character");
  }
  selector.alternatives_.push_back(std::move(complex));
  return selector;
}

bool Selector::MatchesCompound(const Compound& c, const Node& node) {
  if (node.is_text() || node.tag.empty()) return false;
  if (!c.tag.empty() && c.tag != node.tag) return false;
  if (!c.id.empty() && node.Attribute("id") != c.id) return false;
  for (const std::string& cls : c.classes) {
    if (!node.HasClass(cls)) return false;
  }
  for (const AttributeTest& test : c.attributes) {
    auto it = node.attributes.find(test.name);
    if (it == node.attributes.end()) return false;
    if (test.has_value && it->second != test.value) return false;
  }
  return true;
}

bool Selector::MatchesComplex(const Complex& parts, std::size_t last,
                              const Node& node) {
  if (!MatchesCompound(parts[last], node)) return false;
  if (last == 0) return true;
  const bool child = parts[last].child_of_previous;
  for (const Node* up = node.parent; up != nullptr; up = up->parent) {
    if (MatchesComplex(parts, last - 1, *up)) return true;
    if (child) return false;
  }
  return false;
}

bool Selector::Matches(const Node& node) const {
  for (const Complex& complex : alternatives_) {
    if (MatchesComplex(complex, complex.size() - 1, node)) return true;
  }
  return false;
}

std::vector<const Node*> Selector::SelectAll(const Node& scope) const {
  std::vector<const Node*> out;
  if (!empty()) Walk(scope, *this, out);
  return out;
}

const Node* Selector::SelectFirst(const Node& scope) const {
  // Document order; a full walk is fine at guideline sizes.
  auto all = SelectAll(scope);
  return all.empty() ? nullptr : all.front();
}

}  // namespace ckdctx::guideline
