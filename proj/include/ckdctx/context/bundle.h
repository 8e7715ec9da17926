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

#ifndef CKDCTX_CONTEXT_BUNDLE_H_
#define CKDCTX_CONTEXT_BUNDLE_H_

#include <string>
#include <string_view>
#include <vector>

#include "ckdctx/common/json_util.h"
#include "ckdctx/context/routing.h"

namespace ckdctx::context {

enum class PartKind {
  kRiskScore,
  kFeatureImportance,
  kPrototypeSummary,
  kGuidelineText,
  kCohortStat,
  kTemplatedText,
};

std::string_view PartKindName(PartKind kind);
PartKind ParsePartKind(std::string_view name, const std::string& path);

// Where a part came from: the producing module, the store artifact and the
// identifiers inside it (patient ids, rec_ids, model ids, template ids).
struct Provenance {
  std::string module;
  std::string artifact;
  std::vector<std::string> ids;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

// Payload shapes by kind:
//   RiskScore          {patient_id, risk, display, model_kind}
//   FeatureImportance  {scope, entries[{feature, label, ...}], ...}
//   PrototypeSummary   summary JSON plus patient_ids
//   GuidelineText      {rec_id, text, grade, ...} or {section, text}
//   CohortStat         {patient_id, lab_flags[], conditions[]}
//   TemplatedText      {template_id, text, slots{}, slot_parts{slot: index}}
struct AnswerPart {
  PartKind kind;
  Json payload;
  Provenance provenance;

  friend bool operator==(const AnswerPart&, const AnswerPart&) = default;
};

class AnswerBundle {
 public:
  // Throws kRender when there are no parts, a part lacks provenance, or a
  // templated part refers to a slot source outside the bundle.
  AnswerBundle(std::string question, QuestionKind kind,
               QuestionAnnotation annotation, std::string patient_id,
               std::vector<AnswerPart> parts);

  const std::string& question() const { return question_; }
  QuestionKind kind() const { return kind_; }
  const QuestionAnnotation& annotation() const { return annotation_; }
  const std::string& patient_id() const { return patient_id_; }  // may be ""
  const std::vector<AnswerPart>& parts() const { return parts_; }

  friend bool operator==(const AnswerBundle&, const AnswerBundle&) = default;

 private:
  std::string question_;
  QuestionKind kind_;
  QuestionAnnotation annotation_;
  std::string patient_id_;
  std::vector<AnswerPart> parts_;
};

Json ToJson(const AnswerBundle& bundle);
AnswerBundle AnswerBundleFromJson(const Json& json);

enum class RenderFormat { kJson, kText };
RenderFormat ParseRenderFormat(std::string_view name);

// JSON is canonical and lossless. Text lists the parts in order, each
// tagged with a footnote number, followed by the provenance footnotes.
std::string Render(const AnswerBundle& bundle, RenderFormat format);

}  // namespace ckdctx::context

#endif  // CKDCTX_CONTEXT_BUNDLE_H_
