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

#ifndef CKDCTX_GUIDELINE_HTML_H_
#define CKDCTX_GUIDELINE_HTML_H_

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace ckdctx::guideline {

// Element or text node of a parsed HTML tree. The root is an element with
// an empty tag.
struct Node {
  std::string tag;  // lowercase; empty for text nodes and the root
  std::map<std::string, std::string> attributes;
  std::string text;  // text nodes only, entities decoded
  std::vector<std::unique_ptr<Node>> children;
  Node* parent = nullptr;

  bool is_text() const { return tag.empty() && parent != nullptr; }
  bool HasClass(std::string_view name) const;
  std::string Attribute(const std::string& name) const;
  // Concatenated descendant text.
  std::string InnerText() const;
  // As InnerText, but subtrees for which `skip` is true contribute nothing.
  std::string InnerText(const std::function<bool(const Node&)>& skip) const;
};

// Lenient parser: unknown end tags are ignored, unclosed elements are closed
// implicitly, void elements never take children, and <script>/<style>
// bodies and comments are dropped.
std::unique_ptr<Node> ParseHtmlTree(std::string_view html);

std::string DecodeEntities(std::string_view text);

// Collapses whitespace runs to one space and trims both ends.
std::string NormalizeWhitespace(std::string_view text);

}  // namespace ckdctx::guideline

#endif  // CKDCTX_GUIDELINE_HTML_H_
