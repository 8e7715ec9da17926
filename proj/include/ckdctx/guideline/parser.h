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

#ifndef CKDCTX_GUIDELINE_PARSER_H_
#define CKDCTX_GUIDELINE_PARSER_H_

#include <string>
#include <string_view>
#include <vector>

#include "ckdctx/common/json_util.h"
#include "ckdctx/guideline/document.h"

namespace ckdctx::guideline {

// Maps structural markers in a guideline page to document roles. Chapter
// parts are searched within the chapter, group parts within the group.
struct ParseConfig {
  std::string doc_id = "guideline";
  std::string title_selector = "h1";
  std::string year_selector;  // first four-digit number in its text
  std::string chapter_selector = "section.chapter";
  std::string chapter_title_selector = "h2";
  std::string chapter_id_attribute = "data-chapter";
  std::string group_selector = "div.rec-group";
  std::string group_title_selector = "h3";
  std::string recommendation_selector = "div.rec";
  std::string grade_selector = "span.grade";
  // ECMAScript regex; group 1 (or the whole match) must be a grade letter.
  std::string grade_pattern = "^([ABCE])$";
  // Also accept a bare grade letter ending the recommendation text.
  bool trailing_grade = false;
  std::string ignore_selector;  // removed from recommendation text
  std::string free_text_selector;
  std::string free_text_title_selector;

  static ParseConfig FromJson(const Json& json);
  Json ToJson() const;
};

struct SkippedNode {
  std::string node;  // e.g. "div.rec#3" (tag, classes, document ordinal)
  std::string reason;
};

struct ParseResult {
  GuidelineDoc doc;
  std::vector<SkippedNode> skipped;
};

// Throws kStructure when no chapters or no recommendations are found, when
// a chapter lacks a title, or when chapter titles repeat.
ParseResult ParseHtml(std::string_view html, const ParseConfig& config);

Json ToJson(const std::vector<SkippedNode>& skipped);

}  // namespace ckdctx::guideline

#endif  // CKDCTX_GUIDELINE_PARSER_H_
