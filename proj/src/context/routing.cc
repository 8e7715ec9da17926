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

#include "ckdctx/context/routing.h"

#include "ckdctx/common/error.h"

namespace ckdctx::context {
namespace {

constexpr QuestionKind kAllKinds[] = {
    QuestionKind::kPrototypeOverview,     QuestionKind::kRiskRationale,
    QuestionKind::kPatientDescription,    QuestionKind::kLabThresholdGuideline,
    QuestionKind::kDrugViability,         QuestionKind::kComplicationTreatment,
    QuestionKind::kTreatmentGoals,        QuestionKind::kFreeText};

template <typename E, std::size_t N>
E ParseEnum(std::string_view text, const E (&values)[N],
            std::string_view (*name)(E), const std::string& path) {
  for (E v : values) {
    if (name(v) == text) return v;
  }
  throw Error(ErrorCode::kValidation,
              "unknown value '" + std::string(text) + "' at " + path, path);
}

}  // namespace

const std::vector<QuestionKind>& NamedKinds() {
  static const std::vector<QuestionKind> kinds(std::begin(kAllKinds),
                                               std::end(kAllKinds) - 1);
  return kinds;
}

std::string_view KindLabel(QuestionKind kind) {
  switch (kind) {
    case QuestionKind::kPrototypeOverview: return "Q1";
    case QuestionKind::kRiskRationale: return "Q2";
    case QuestionKind::kPatientDescription: return "Q3";
    case QuestionKind::kLabThresholdGuideline: return "Q3a";
    case QuestionKind::kDrugViability: return "Q4";
    case QuestionKind::kComplicationTreatment: return "Q5";
    case QuestionKind::kTreatmentGoals: return "Q6";
    case QuestionKind::kFreeText: return "FreeText";
  }
  return "FreeText";
}

std::string_view KindName(QuestionKind kind) {
  switch (kind) {
    case QuestionKind::kPrototypeOverview: return "PrototypeOverview";
    case QuestionKind::kRiskRationale: return "RiskRationale";
    case QuestionKind::kPatientDescription: return "PatientDescription";
    case QuestionKind::kLabThresholdGuideline: return "LabThresholdGuideline";
    case QuestionKind::kDrugViability: return "DrugViability";
    case QuestionKind::kComplicationTreatment: return "ComplicationTreatment";
    case QuestionKind::kTreatmentGoals: return "TreatmentGoals";
    case QuestionKind::kFreeText: return "FreeText";
  }
  return "FreeText";
}

std::optional<QuestionKind> ParseKind(std::string_view text) {
  for (QuestionKind k : kAllKinds) {
    if (KindLabel(k) == text || KindName(k) == text) return k;
  }
  return std::nullopt;
}

QuestionAnnotation Annotation(QuestionKind kind) {
  using D = Dimension;
  switch (kind) {
    case QuestionKind::kPrototypeOverview:
      return {Source::kAlgorithmic, Relevance::kBoth, {D::kPostHocExplanation}};
    case QuestionKind::kRiskRationale:
      return {Source::kAlgorithmic, Relevance::kCkd, {D::kRiskPrediction}};
    case QuestionKind::kPatientDescription:
      return {Source::kAlgorithmic, Relevance::kT2dm, {D::kRiskPrediction}};
    case QuestionKind::kLabThresholdGuideline:
      return {Source::kGuidelines, Relevance::kT2dm, {D::kPatient}};
    case QuestionKind::kDrugViability:
    case QuestionKind::kComplicationTreatment:
      return {Source::kGuidelines,
              Relevance::kBoth,
              {D::kPatient, D::kRiskPrediction}};
    case QuestionKind::kTreatmentGoals:
      return {Source::kGuidelines, Relevance::kT2dm, {D::kPatient}};
    case QuestionKind::kFreeText:
      return {Source::kGuidelines, Relevance::kBoth, {D::kPatient}};
  }
  return {};
}

bool NeedsPatient(QuestionKind kind) {
  return kind != QuestionKind::kPrototypeOverview &&
         kind != QuestionKind::kFreeText;
}

Route RouteQuestion(std::string_view kind_or_text) {
  auto kind = ParseKind(kind_or_text);
  const QuestionKind k = kind.value_or(QuestionKind::kFreeText);
  return {k, Annotation(k)};
}

std::string_view SourceName(Source source) {
  switch (source) {
    case Source::kAlgorithmic: return "Algorithmic";
    case Source::kGuidelines: return "Guidelines";
    case Source::kBoth: return "Both";
  }
  return "Both";
}

std::string_view RelevanceName(Relevance relevance) {
  switch (relevance) {
    case Relevance::kT2dm: return "T2DM";
    case Relevance::kCkd: return "CKD";
    case Relevance::kBoth: return "Both";
  }
  return "Both";
}

std::string_view DimensionName(Dimension dimension) {
  switch (dimension) {
    case Dimension::kPatient: return "Patient";
    case Dimension::kRiskPrediction: return "RiskPrediction";
    case Dimension::kPostHocExplanation: return "PostHocExplanation";
  }
  return "Patient";
}

std::string DimensionsText(const std::set<Dimension>& dimensions) {
  std::string out;
  for (Dimension d : dimensions) {
    if (!out.empty()) out += " + ";
    switch (d) {
      case Dimension::kPatient: out += "patient"; break;
      case Dimension::kRiskPrediction: out += "risk prediction"; break;
      case Dimension::kPostHocExplanation: out += "post-hoc explanation"; break;
    }
  }
  return out;
}

Json ToJson(const QuestionAnnotation& a) {
  Json dims = Json::array();
  for (Dimension d : a.dimensions) dims.push_back(DimensionName(d));
  return {{"source", SourceName(a.source)},
          {"relevance", RelevanceName(a.relevance)},
          {"dimensions", std::move(dims)}};
}

QuestionAnnotation AnnotationFromJson(const Json& json,
                                      const std::string& path) {
  static constexpr Source kSources[] = {Source::kAlgorithmic,
                                        Source::kGuidelines, Source::kBoth};
  static constexpr Relevance kRelevances[] = {
      Relevance::kT2dm, Relevance::kCkd, Relevance::kBoth};
  static constexpr Dimension kDimensions[] = {Dimension::kPatient,
                                              Dimension::kRiskPrediction,
                                              Dimension::kPostHocExplanation};
  RejectUnknownFields(json, {"source", "relevance", "dimensions"}, path);
  QuestionAnnotation a;
  a.source = ParseEnum(RequireString(json, "source", path), kSources,
                       &SourceName, path + "/source");
  a.relevance = ParseEnum(RequireString(json, "relevance", path), kRelevances,
                          &RelevanceName, path + "/relevance");
  const Json& dims = RequireArray(json, "dimensions", path);
  for (std::size_t i = 0; i < dims.size(); ++i) {
    const std::string p = path + "/dimensions/" + std::to_string(i);
    if (!dims[i].is_string()) {
      throw Error(ErrorCode::kValidation, "expected a string at " + p, p);
    }
    a.dimensions.insert(ParseEnum(dims[i].get<std::string>(), kDimensions,
                                  &DimensionName, p));
  }
  if (a.dimensions.empty()) {
    throw Error(ErrorCode::kValidation, "dimensions must not be empty",
                path + "/dimensions");
  }
  return a;
}

}  // namespace ckdctx::context
