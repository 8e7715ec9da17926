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

#include "ckdctx/guideline/parser.h"

#include <map>
#include <regex>
#include <set>

#include "ckdctx/common/error.h"
#include "ckdctx/guideline/html.h"
#include "ckdctx/guideline/selector.h"

namespace ckdctx::guideline {
namespace {

struct Selectors {
  Selector title, year, chapter, chapter_title, group, group_title, rec,
      grade, ignore, free_text, free_text_title;
};

Selectors Compile(const ParseConfig& c) {
  return {Selector::Parse(c.title_selector),
          Selector::Parse(c.year_selector),
          Selector::Parse(c.chapter_selector),
          Selector::Parse(c.chapter_title_selector),
          Selector::Parse(c.group_selector),
          Selector::Parse(c.group_title_selector),
          Selector::Parse(c.recommendation_selector),
          Selector::Parse(c.grade_selector),
          Selector::Parse(c.ignore_selector),
          Selector::Parse(c.free_text_selector),
          Selector::Parse(c.free_text_title_selector)};
}

void NumberElements(const Node& node, std::map<const Node*, std::size_t>& out) {
  for (const auto& child : node.children) {
    if (child->is_text()) continue;
    out.emplace(child.get(), out.size() + 1);
    NumberElements(*child, out);
  }
}

bool HasAncestor(const Node& node, const Selector& selector) {
  for (const Node* up = node.parent; up != nullptr; up = up->parent) {
    if (selector.Matches(*up)) return true;
  }
  return false;
}

std::optional<Grade> GradeFromLetter(std::string_view s) {
  if (s == "A") return Grade::kA;
  if (s == "B") return Grade::kB;
  if (s == "C") return Grade::kC;
  if (s == "E") return Grade::kE;
  return std::nullopt;
}

class HtmlParser {
 public:
  HtmlParser(const ParseConfig& config, const Node& root)
      : config_(config), root_(root), sel_(Compile(config)) {
    try {
      grade_re_ = std::regex(config.grade_pattern, std::regex::ECMAScript);
    } catch (const std::regex_error& e) {
      throw Error(ErrorCode::kConfig,
                  "bad grade_pattern '" + config.grade_pattern + "': " +
                      e.what(),
                  "grade_pattern");
    }
    NumberElements(root, ordinals_);
  }

  ParseResult Run() {
    ParseResult result;
    GuidelineDoc& doc = result.doc;
    doc.doc_id = config_.doc_id;
    if (const Node* t = sel_.title.SelectFirst(root_)) {
      doc.title = NormalizeWhitespace(t->InnerText());
    }
    if (const Node* y = sel_.year.SelectFirst(root_)) {
      static const std::regex kYear("\\b(\\d{4})\\b");
      const std::string text = y->InnerText();
      std::smatch m;
      if (std::regex_search(text, m, kYear)) doc.year = std::stoi(m[1]);
    }

    std::set<std::string> titles;
    for (const Node* chapter_node : sel_.chapter.SelectAll(root_)) {
      if (HasAncestor(*chapter_node, sel_.chapter)) {
        Skip(*chapter_node, "chapter nested in another chapter");
        continue;
      }
      Chapter ch = ParseChapter(*chapter_node, doc.chapters.size() + 1);
      if (!titles.insert(ch.title).second) {
        throw Error(ErrorCode::kStructure,
                    "duplicate chapter title '" + ch.title + "'");
      }
      doc.chapters.push_back(std::move(ch));
    }
    if (doc.chapters.empty()) {
      throw Error(ErrorCode::kStructure,
                  "no chapters match '" + config_.chapter_selector + "'");
    }
    for (const Node* rec : sel_.rec.SelectAll(root_)) {
      if (!consumed_.count(rec)) {
        Skip(*rec, "recommendation block outside a chapter group");
      }
    }
    if (doc.RecommendationCount() == 0) {
      throw Error(ErrorCode::kStructure,
                  "no recommendations match '" +
                      config_.recommendation_selector + "'");
    }
    result.skipped = std::move(skipped_);
    return result;
  }

 private:
  Chapter ParseChapter(const Node& node, std::size_t ordinal) {
    Chapter ch;
    ch.chapter_id = node.Attribute(config_.chapter_id_attribute);
    if (ch.chapter_id.empty()) ch.chapter_id = std::to_string(ordinal);
    const Node* title = sel_.chapter_title.SelectFirst(node);
    if (title != nullptr) ch.title = NormalizeWhitespace(title->InnerText());
    if (ch.title.empty()) {
      throw Error(ErrorCode::kStructure,
                  "chapter " + ch.chapter_id + " has no title matching '" +
                      config_.chapter_title_selector + "'");
    }
    for (const Node* group_node : sel_.group.SelectAll(node)) {
      if (HasAncestor(*group_node, sel_.group)) {
        Skip(*group_node, "group nested in another group");
        continue;
      }
      RecommendationGroup group;
      group.group_id = std::to_string(ch.groups.size() + 1);
      if (const Node* t = sel_.group_title.SelectFirst(*group_node)) {
        group.topic = NormalizeWhitespace(t->InnerText());
      }
      for (const Node* rec_node : sel_.rec.SelectAll(*group_node)) {
        if (consumed_.count(rec_node)) continue;
        consumed_.insert(rec_node);
        Recommendation rec = ParseRecommendation(*rec_node);
        if (rec.text.empty()) {
          Skip(*rec_node, "empty recommendation text");
          continue;
        }
        rec.rec_id = ch.chapter_id + "." + group.group_id + "." +
                     std::to_string(group.recommendations.size() + 1);
        group.recommendations.push_back(std::move(rec));
      }
      if (group.recommendations.empty()) {
        Skip(*group_node, "group without recommendations");
        continue;
      }
      ch.groups.push_back(std::move(group));
    }
    for (const Node* section : sel_.free_text.SelectAll(node)) {
      const Node* title = sel_.free_text_title.SelectFirst(*section);
      FreeTextSection s;
      if (title != nullptr) s.title = NormalizeWhitespace(title->InnerText());
      s.text = NormalizeWhitespace(
          section->InnerText([&](const Node& n) { return &n == title; }));
      ch.free_text_sections.push_back(std::move(s));
    }
    return ch;
  }

  Recommendation ParseRecommendation(const Node& node) {
    Recommendation rec;
    const Node* marker = sel_.grade.SelectFirst(node);
    std::string text = NormalizeWhitespace(node.InnerText([&](const Node& n) {
      return &n == marker || sel_.ignore.Matches(n);
    }));
    if (marker != nullptr) {
      const std::string letter = MatchGrade(
          NormalizeWhitespace(marker->InnerText()));
      if (auto g = GradeFromLetter(letter)) {
        rec.grade = *g;
      } else {
        Skip(*marker, "unrecognized grade marker");
      }
    } else if (config_.trailing_grade && text.size() >= 2 &&
               text[text.size() - 2] == ' ') {
      if (auto g = GradeFromLetter(MatchGrade(text.substr(text.size() - 1)))) {
        rec.grade = *g;
        text = NormalizeWhitespace(text.substr(0, text.size() - 2));
      }
    }
    rec.text = std::move(text);
    rec.numeric_constraints = qa::ParseNumericPhrases(rec.text);
    return rec;
  }

  std::string MatchGrade(const std::string& text) const {
    std::smatch m;
    if (!std::regex_search(text, m, grade_re_)) return "";
    return m.size() > 1 && m[1].matched ? m[1].str() : m[0].str();
  }

  void Skip(const Node& node, std::string reason) {
    std::string label = node.tag;
    auto it = node.attributes.find("class");
    if (it != node.attributes.end()) {
      for (char c : NormalizeWhitespace(it->second)) {
        label.push_back(c == ' ' ? '.' : c);
      }
      label.insert(node.tag.size(), ".");
    }
    label += "#" + std::to_string(ordinals_.at(&node));
    skipped_.push_back({std::move(label), std::move(reason)});
  }

  const ParseConfig& config_;
  const Node& root_;
  Selectors sel_;
  std::regex grade_re_;
  std::map<const Node*, std::size_t> ordinals_;
  std::set<const Node*> consumed_;
  std::vector<SkippedNode> skipped_;
};

}  // namespace

ParseConfig ParseConfig::FromJson(const Json& json) {
  const std::string root;
  RejectUnknownFields(
      json,
      {"doc_id", "title_selector", "year_selector", "chapter_selector",
       "chapter_title_selector", "chapter_id_attribute", "group_selector",
       "group_title_selector", "recommendation_selector", "grade_selector",
       "grade_pattern", "trailing_grade", "ignore_selector",
       "free_text_selector", "free_text_title_selector"},
      root);
  ParseConfig c;
  auto str = [&](const char* key, std::string& field) {
    if (json.contains(key)) field = RequireString(json, key, root);
  };
  str("doc_id", c.doc_id);
  str("title_selector", c.title_selector);
  str("year_selector", c.year_selector);
  str("chapter_selector", c.chapter_selector);
  str("chapter_title_selector", c.chapter_title_selector);
  str("chapter_id_attribute", c.chapter_id_attribute);
  str("group_selector", c.group_selector);
  str("group_title_selector", c.group_title_selector);
  str("recommendation_selector", c.recommendation_selector);
  str("grade_selector", c.grade_selector);
  str("grade_pattern", c.grade_pattern);
  str("ignore_selector", c.ignore_selector);
  str("free_text_selector", c.free_text_selector);
  str("free_text_title_selector", c.free_text_title_selector);
  if (json.contains("trailing_grade")) {
    const Json& v = json["trailing_grade"];
    if (!v.is_boolean()) {
      throw Error(ErrorCode::kValidation,
                  "expected a boolean at /trailing_grade", "/trailing_grade");
    }
    c.trailing_grade = v.get<bool>();
  }
  return c;
}

Json ParseConfig::ToJson() const {
  return {{"doc_id", doc_id},
          {"title_selector", title_selector},
          {"year_selector", year_selector},
          {"chapter_selector", chapter_selector},
          {"chapter_title_selector", chapter_title_selector},
          {"chapter_id_attribute", chapter_id_attribute},
          {"group_selector", group_selector},
          {"group_title_selector", group_title_selector},
          {"recommendation_selector", recommendation_selector},
          {"grade_selector", grade_selector},
          {"grade_pattern", grade_pattern},
          {"trailing_grade", trailing_grade},
          {"ignore_selector", ignore_selector},
          {"free_text_selector", free_text_selector},
          {"free_text_title_selector", free_text_title_selector}};
}

ParseResult ParseHtml(std::string_view html, const ParseConfig& config) {
  const std::unique_ptr<Node> root = ParseHtmlTree(html);
  return HtmlParser(config, *root).Run();
}

Json ToJson(const std::vector<SkippedNode>& skipped) {
  Json out = Json::array();
  for (const SkippedNode& s : skipped) {
    out.push_back({{"node", s.node}, {"reason", s.reason}});
  }
  return out;
}

}  // namespace ckdctx::guideline
