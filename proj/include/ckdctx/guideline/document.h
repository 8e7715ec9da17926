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

#ifndef CKDCTX_GUIDELINE_DOCUMENT_H_
#define CKDCTX_GUIDELINE_DOCUMENT_H_

#include <string>
#include <string_view>
#include <vector>

#include "ckdctx/common/json_util.h"
#include "ckdctx/qa/answerer.h"
#include "ckdctx/qa/numeric.h"

namespace ckdctx::guideline {

inline constexpr std::string_view kSchemaVersion = "1";

enum class Grade { kA, kB, kC, kE, kUngraded };

std::string_view GradeName(Grade grade);  // "A", ..., "Ungraded"
// Throws kValidation naming `path`.
Grade ParseGrade(std::string_view name, const std::string& path);

struct Recommendation {
  std::string rec_id;  // chapter.group.ordinal
  std::string text;
  Grade grade = Grade::kUngraded;
  // Cached ParseNumericPhrases(text).
  std::vector<qa::NumericConstraint> numeric_constraints;

  friend bool operator==(const Recommendation&,
                         const Recommendation&) = default;
};

struct RecommendationGroup {
  std::string group_id;
  std::string topic;
  std::vector<Recommendation> recommendations;

  friend bool operator==(const RecommendationGroup&,
                         const RecommendationGroup&) = default;
};

// Tabular or narrative content kept verbatim.
struct FreeTextSection {
  std::string title;
  std::string text;

  friend bool operator==(const FreeTextSection&,
                         const FreeTextSection&) = default;
};

struct Chapter {
  std::string chapter_id;
  std::string title;
  std::vector<RecommendationGroup> groups;
  std::vector<FreeTextSection> free_text_sections;

  friend bool operator==(const Chapter&, const Chapter&) = default;
};

struct GuidelineDoc {
  std::string doc_id;
  std::string title;
  int year = 0;
  std::vector<Chapter> chapters;

  std::size_t RecommendationCount() const;
  // nullptr when absent.
  const Recommendation* FindRecommendation(std::string_view rec_id) const;

  friend bool operator==(const GuidelineDoc&, const GuidelineDoc&) = default;
};

struct Violation {
  std::string path;  // JSON pointer into the serialized document
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

// Checks the type invariants plus rec_id format and cache coherence. An
// empty result means the document is valid.
std::vector<Violation> Validate(const GuidelineDoc& doc);
// Throws kValidation carrying the first violation.
void RequireValid(const GuidelineDoc& doc);

Json ToJson(const GuidelineDoc& doc);
// Strict mode rejects unknown fields. Throws kValidation with a JSON path,
// or kUnsupportedVersion for another schema_version.
GuidelineDoc GuidelineDocFromJson(const Json& json, bool strict = true);

// One passage per recommendation, in document order.
std::vector<qa::Passage> ToPassages(const GuidelineDoc& doc);

}  // namespace ckdctx::guideline

#endif  // CKDCTX_GUIDELINE_DOCUMENT_H_
