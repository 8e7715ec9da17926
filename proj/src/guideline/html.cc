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

#include "ckdctx/guideline/html.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>

namespace ckdctx::guideline {
namespace {

const std::set<std::string, std::less<>> kVoidElements = {
    "area", "base", "br",   "col",   "embed",  "hr",    "img",
    "input", "link", "meta", "param", "source", "track", "wbr"};

// Opening one of these closes an open <p>.
const std::set<std::string, std::less<>> kClosesParagraph = {
    "address", "article", "aside", "blockquote", "div", "dl", "fieldset",
    "footer", "form", "h1", "h2", "h3", "h4", "h5", "h6", "header", "hr",
    "li", "main", "nav", "ol", "p", "pre", "section", "table", "ul"};

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

void AppendUtf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool IsNameChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-' ||
         c == '_' || c == ':';
}

class TreeBuilder {
 public:
  explicit TreeBuilder(std::string_view html) : html_(html) {
    root_ = std::make_unique<Node>();
    open_.push_back(root_.get());
  }

  std::unique_ptr<Node> Build() {
    while (pos_ < html_.size()) {
      if (html_[pos_] == '<') {
        if (StartsWith("<!--")) {
          SkipPast("-->");
        } else if (StartsWith("<!") || StartsWith("<?")) {
          SkipPast(">");
        } else if (StartsWith("</")) {
          EndTag();
        } else if (pos_ + 1 < html_.size() &&
                   std::isalpha(static_cast<unsigned char>(html_[pos_ + 1]))) {
          StartTag();
        } else {
          Text(pos_ + 1);
        }
      } else {
        Text(html_.find('<', pos_));
      }
    }
    return std::move(root_);
  }

 private:
  bool StartsWith(std::string_view prefix) const {
    return html_.substr(pos_, prefix.size()) == prefix;
  }

  void SkipPast(std::string_view marker) {
    const std::size_t end = html_.find(marker, pos_);
    pos_ = end == std::string_view::npos ? html_.size() : end + marker.size();
  }

  void Text(std::size_t end) {
    if (end == std::string_view::npos) end = html_.size();
    AddText(DecodeEntities(html_.substr(pos_, end - pos_)));
    pos_ = end;
  }

  void AddText(std::string text) {
    if (text.empty()) return;
    Node* parent = open_.back();
    if (!parent->children.empty() && parent->children.back()->is_text()) {
      parent->children.back()->text += text;
      return;
    }
    auto node = std::make_unique<Node>();
    node->text = std::move(text);
    node->parent = parent;
    parent->children.push_back(std::move(node));
  }

  void SkipSpace() {
    while (pos_ < html_.size() &&
           std::isspace(static_cast<unsigned char>(html_[pos_]))) {
      ++pos_;
    }
  }

  std::string Name() {
    const std::size_t start = pos_;
    while (pos_ < html_.size() && IsNameChar(html_[pos_])) ++pos_;
    return Lower(html_.substr(start, pos_ - start));
  }

  void StartTag() {
    ++pos_;  // '<'
    auto node = std::make_unique<Node>();
    node->tag = Name();
    bool self_closing = false;
    while (pos_ < html_.size()) {
      SkipSpace();
      if (pos_ >= html_.size()) break;
      if (html_[pos_] == '>') {
        ++pos_;
        break;
      }
      if (html_[pos_] == '/') {
        self_closing = true;
        ++pos_;
        continue;
      }
      std::string name = Name();
      if (name.empty()) {
        ++pos_;  // stray character inside the tag
        continue;
      }
      SkipSpace();
      std::string value;
      if (pos_ < html_.size() && html_[pos_] == '=') {
        ++pos_;
        SkipSpace();
        if (pos_ < html_.size() && (html_[pos_] == '"' || html_[pos_] == '\'')) {
          const char quote = html_[pos_++];
          const std::size_t end = html_.find(quote, pos_);
          const std::size_t stop = end == std::string_view::npos ? html_.size()
                                                                 : end;
          value = DecodeEntities(html_.substr(pos_, stop - pos_));
          pos_ = std::min(html_.size(), stop + 1);
        } else {
          const std::size_t start = pos_;
          while (pos_ < html_.size() && html_[pos_] != '>' &&
                 !std::isspace(static_cast<unsigned char>(html_[pos_]))) {
            ++pos_;
          }
          value = DecodeEntities(html_.substr(start, pos_ - start));
        }
      }
      node->attributes.emplace(std::move(name), std::move(value));
    }

    if (node->tag == "script" || node->tag == "style") {
      const std::string close = "</" + node->tag;
      std::size_t end = pos_;
      while (true) {
        end = html_.find('<', end);
        if (end == std::string_view::npos ||
            Lower(html_.substr(end, close.size())) == close) {
          break;
        }
        ++end;
      }
      pos_ = end == std::string_view::npos ? html_.size() : end;
      SkipPast(">");
      return;
    }

    ImplicitClose(node->tag);
    Node* parent = open_.back();
    node->parent = parent;
    Node* raw = node.get();
    parent->children.push_back(std::move(node));
    if (!self_closing && !kVoidElements.count(raw->tag)) open_.push_back(raw);
  }

  void ImplicitClose(const std::string& tag) {
    if (kClosesParagraph.count(tag)) PopIfOpen("p");
    if (tag == "li") PopToSibling("li", {"ul", "ol"});
    if (tag == "dt" || tag == "dd") {
      PopToSibling("dt", {"dl"});
      PopToSibling("dd", {"dl"});
    }
    if (tag == "tr") PopToSibling("tr", {"table", "tbody", "thead"});
    if (tag == "td" || tag == "th") {
      PopToSibling("td", {"tr", "table"});
      PopToSibling("th", {"tr", "table"});
    }
  }

  void PopIfOpen(std::string_view tag) {
    if (open_.size() > 1 && open_.back()->tag == tag) open_.pop_back();
  }

  // Closes an open `tag` unless a scoping ancestor intervenes.
  void PopToSibling(std::string_view tag,
                    std::initializer_list<std::string_view> scopes) {
    for (std::size_t i = open_.size(); i-- > 1;) {
      const std::string& t = open_[i]->tag;
      if (t == tag) {
        open_.resize(i);
        return;
      }
      if (std::find(scopes.begin(), scopes.end(), t) != scopes.end()) return;
    }
  }

  void EndTag() {
    pos_ += 2;
    const std::string name = Name();
    SkipPast(">");
    for (std::size_t i = open_.size(); i-- > 1;) {
      if (open_[i]->tag == name) {
        open_.resize(i);
        return;
      }
    }
    // Unmatched end tag: ignored.
  }

  std::string_view html_;
  std::size_t pos_ = 0;
  std::unique_ptr<Node> root_;
  std::vector<Node*> open_;
};

void CollectText(const Node& node, std::string& out,
                 const std::function<bool(const Node&)>& skip) {
  if (skip && !node.is_text() && skip(node)) return;
  if (node.is_text()) {
    out += node.text;
    return;
  }
  if (node.tag == "br") out += ' ';
  for (const auto& child : node.children) CollectText(*child, out, skip);
  // Block boundaries separate words.
  if (kClosesParagraph.count(node.tag) || node.tag == "td" ||
      node.tag == "th" || node.tag == "tr") {
    out += ' ';
  }
}

}  // namespace

bool Node::HasClass(std::string_view name) const {
  auto it = attributes.find("class");
  if (it == attributes.end()) return false;
  std::string_view classes = it->second;
  std::size_t pos = 0;
  while (pos < classes.size()) {
    while (pos < classes.size() &&
           std::isspace(static_cast<unsigned char>(classes[pos]))) {
      ++pos;
    }
    std::size_t end = pos;
    while (end < classes.size() &&
           !std::isspace(static_cast<unsigned char>(classes[end]))) {
      ++end;
    }
    if (end > pos && classes.substr(pos, end - pos) == name) return true;
    pos = end;
  }
  return false;
}

std::string Node::Attribute(const std::string& name) const {
  auto it = attributes.find(name);
  return it == attributes.end() ? "" : it->second;
}

std::string Node::InnerText() const { return InnerText(nullptr); }

std::string Node::InnerText(
    const std::function<bool(const Node&)>& skip) const {
  std::string out;
  for (const auto& child : children) CollectText(*child, out, skip);
  return out;
}

std::unique_ptr<Node> ParseHtmlTree(std::string_view html) {
  return TreeBuilder(html).Build();
}

std::string DecodeEntities(std::string_view text) {
  static const std::map<std::string, char32_t, std::less<>> kNamed = {
      {"amp", U'&'},      {"lt", U'<'},       {"gt", U'>'},
      {"quot", U'"'},     {"apos", U'\''},    {"nbsp", U' '},
      {"ndash", U'–'}, {"mdash", U'—'}, {"ge", U'≥'},
      {"le", U'≤'},  {"lsquo", U'‘'}, {"rsquo", U'’'},
      {"ldquo", U'“'}, {"rdquo", U'”'}, {"deg", U'°'},
      {"micro", U'µ'}, {"times", U'×'}, {"plusmn", U'±'},
      {"hellip", U'…'}, {"reg", U'®'},  {"copy", U'©'}};
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '&') {
      out.push_back(text[i++]);
      continue;
    }
    const std::size_t semi = text.find(';', i);
    if (semi == std::string_view::npos || semi - i > 10) {
      out.push_back(text[i++]);
      continue;
    }
    const std::string_view body = text.substr(i + 1, semi - i - 1);
    bool decoded = false;
    if (!body.empty() && body[0] == '#') {
      const bool hex = body.size() > 1 && (body[1] == 'x' || body[1] == 'X');
      const std::string_view digits = body.substr(hex ? 2 : 1);
      std::uint32_t cp = 0;
      auto [ptr, ec] = std::from_chars(digits.data(),
                                       digits.data() + digits.size(), cp,
                                       hex ? 16 : 10);
      if (ec == std::errc() && ptr == digits.data() + digits.size() &&
          !digits.empty() && cp > 0 && cp <= 0x10FFFF) {
        AppendUtf8(out, static_cast<char32_t>(cp));
        decoded = true;
      }
    } else if (auto it = kNamed.find(body); it != kNamed.end()) {
      AppendUtf8(out, it->second);
      decoded = true;
    }
    if (decoded) {
      i = semi + 1;
    } else {
      out.push_back(text[i++]);
    }
  }
  return out;
}

std::string NormalizeWhitespace(std::string_view text) {
  std::string out;
  bool pending_space = false;
  std::size_t i = 0;
  while (i < text.size()) {
    const unsigned char c = static_cast<unsigned char>(text[i]);
    // U+00A0 counts as whitespace.
    const bool nbsp = c == 0xC2 && i + 1 < text.size() &&
                      static_cast<unsigned char>(text[i + 1]) == 0xA0;
    if (std::isspace(c) || nbsp) {
      pending_space = !out.empty();
      i += nbsp ? 2 : 1;
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(c));
    ++i;
  }
  return out;
}

}  // namespace ckdctx::guideline
