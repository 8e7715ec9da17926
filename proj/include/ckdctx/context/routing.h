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

#ifndef CKDCTX_CONTEXT_ROUTING_H_
#define CKDCTX_CONTEXT_ROUTING_H_

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ckdctx/common/json_util.h"

namespace ckdctx::context {

enum class Source { kAlgorithmic, kGuidelines, kBoth };
enum class Relevance { kT2dm, kCkd, kBoth };
enum class Dimension { kPatient, kRiskPrediction, kPostHocExplanation };

struct QuestionAnnotation {
  Source source = Source::kGuidelines;
  Relevance relevance = Relevance::kBoth;
  std::set<Dimension> dimensions;  // never empty

  friend bool operator==(const QuestionAnnotation&,
                         const QuestionAnnotation&) = default;
};

enum class QuestionKind {
  kPrototypeOverview,      // Q1
  kRiskRationale,          // Q2
  kPatientDescription,     // Q3
  kLabThresholdGuideline,  // Q3a
  kDrugViability,          // Q4
  kComplicationTreatment,  // Q5
  kTreatmentGoals,         // Q6
  kFreeText,
};

// The seven named kinds in question-flow order.
const std::vector<QuestionKind>& NamedKinds();

std::string_view KindLabel(QuestionKind kind);  // "Q1" ... "Q6", "FreeText"
std::string_view KindName(QuestionKind kind);   // "PrototypeOverview", ...
// Accepts a label or a name; nullopt for anything else.
std::optional<QuestionKind> ParseKind(std::string_view text);

QuestionAnnotation Annotation(QuestionKind kind);
bool NeedsPatient(QuestionKind kind);

struct Route {
  QuestionKind kind;
  QuestionAnnotation annotation;
};

// Total: named kinds map to their fixed annotation, any other text routes
// to FreeText.
Route RouteQuestion(std::string_view kind_or_text);

std::string_view SourceName(Source source);
std::string_view RelevanceName(Relevance relevance);
std::string_view DimensionName(Dimension dimension);
// "patient + risk prediction".
std::string DimensionsText(const std::set<Dimension>& dimensions);

Json ToJson(const QuestionAnnotation& annotation);
QuestionAnnotation AnnotationFromJson(const Json& json,
                                      const std::string& path);

}  // namespace ckdctx::context

#endif  // CKDCTX_CONTEXT_ROUTING_H_
