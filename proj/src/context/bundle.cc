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

#include "ckdctx/context/bundle.h"

#include "ckdctx/common/error.h"

namespace ckdctx::context {
namespace {

constexpr PartKind kPartKinds[] = {
    PartKind::kRiskScore,     PartKind::kFeatureImportance,
    PartKind::kPrototypeSummary, PartKind::kGuidelineText,
    PartKind::kCohortStat,    PartKind::kTemplatedText};

std::string Str(const Json& payload, const char* key) {
  auto it = payload.find(key);
  return it != payload.end() && it->is_string() ? it->get<std::string>() : "";
}

std::string Num(const Json& value) {
  return value.is_number() ? FormatFixed(value.get<double>(), 4) : "";
}

std::string RenderPart(const AnswerPart& part) {
  const Json& p = part.payload;
  std::string out;
  switch (part.kind) {
    case PartKind::kRiskScore:
      out = "CKD risk: " + Str(p, "display");
      if (!Str(p, "model_kind").empty()) {
        out += " (" + Str(p, "model_kind") + " model)";
      }
      return out;
    case PartKind::kFeatureImportance: {
      out = Str(p, "scope") == "prototypes"
                ? "Mean |phi| over prototype patients:"
                : "Feature contributions (phi):";
      if (auto it = p.find("entries"); it != p.end() && it->is_array()) {
        for (const Json& e : *it) {
          const std::string label = Str(e, "label");
          out += "\n  " + Str(e, "feature");
          if (!label.empty() && label != Str(e, "feature")) {
            out += " (" + label + ")";
          }
          if (e.contains("phi")) out += "  " + Num(e["phi"]);
          if (e.contains("mean_abs_phi")) out += "  " + Num(e["mean_abs_phi"]);
        }
      }
      return out;
    }
    case PartKind::kPrototypeSummary:
      return "Prototype summary:\n" + Str(p, "table");
    case PartKind::kGuidelineText:
      if (p.contains("rec_id")) {
        out = Str(p, "text") + " (grade " + Str(p, "grade") + ")";
      } else {
        out = Str(p, "section") + ": " + Str(p, "text");
      }
      return out;
    case PartKind::kCohortStat: {
      std::string flags;
      for (const Json& f : p.value("lab_flags", Json::array())) {
        if (!flags.empty()) flags += ", ";
        flags += Str(f, "flag") + " [" + Str(f, "source") + "]";
      }
      out = "Lab flags: " + (flags.empty() ? std::string("none") : flags);
      out += "\nTop conditions:";
      for (const Json& c : p.value("conditions", Json::array())) {
        std::string names;
        for (const Json& n : c.value("ccs", Json::array())) {
          names += " | " + Str(n, "name");
        }
        out += "\n  " + Str(c, "group") + names;
      }
      return out;
    }
    case PartKind::kTemplatedText:
      return Str(p, "text");
  }
  return out;
}

}  // namespace

std::string_view PartKindName(PartKind kind) {
  switch (kind) {
    case PartKind::kRiskScore: return "RiskScore";
    case PartKind::kFeatureImportance: return "FeatureImportance";
    case PartKind::kPrototypeSummary: return "PrototypeSummary";
    case PartKind::kGuidelineText: return "GuidelineText";
    case PartKind::kCohortStat: return "CohortStat";
    case PartKind::kTemplatedText: return "TemplatedText";
  }
  return "TemplatedText";
}

PartKind ParsePartKind(std::string_view name, const std::string& path) {
  for (PartKind k : kPartKinds) {
    if (PartKindName(k) == name) return k;
  }
  throw Error(ErrorCode::kValidation,
              "unknown part kind '" + std::string(name) + "'", path);
}

AnswerBundle::AnswerBundle(std::string question, QuestionKind kind,
                           QuestionAnnotation annotation,
                           std::string patient_id,
                           std::vector<AnswerPart> parts)
    : question_(std::move(question)),
      kind_(kind),
      annotation_(std::move(annotation)),
      patient_id_(std::move(patient_id)),
      parts_(std::move(parts)) {
  if (parts_.empty()) {
    throw Error(ErrorCode::kRender, "an answer bundle needs at least one part");
  }
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    const AnswerPart& part = parts_[i];
    const std::string path = "/parts/" + std::to_string(i);
    if (part.provenance.module.empty() || part.provenance.artifact.empty()) {
      throw Error(ErrorCode::kRender, "part without provenance",
                  path + "/provenance");
    }
    if (part.kind != PartKind::kTemplatedText) continue;
    auto it = part.payload.find("slot_parts");
    if (it == part.payload.end()) continue;
    for (const auto& [slot, index] : it->items()) {
      if (!index.is_number_integer() || index.get<std::int64_t>() < 0 ||
          index.get<std::size_t>() >= i) {
        throw Error(ErrorCode::kRender,
                    "slot '" + slot + "' refers to a part not earlier in the "
                    "bundle",
                    path + "/payload/slot_parts/" + slot);
      }
    }
  }
}

Json ToJson(const AnswerBundle& bundle) {
  Json parts = Json::array();
  for (const AnswerPart& part : bundle.parts()) {
    parts.push_back({{"kind", PartKindName(part.kind)},
                     {"payload", part.payload},
                     {"provenance",
                      {{"module", part.provenance.module},
                       {"artifact", part.provenance.artifact},
                       {"ids", part.provenance.ids}}}});
  }
  return {{"question", bundle.question()},
          {"kind", KindLabel(bundle.kind())},
          {"annotation", ToJson(bundle.annotation())},
          {"patient_id", bundle.patient_id()},
          {"parts", std::move(parts)}};
}

AnswerBundle AnswerBundleFromJson(const Json& json) {
  const std::string root;
  RejectUnknownFields(
      json, {"question", "kind", "annotation", "patient_id", "parts"}, root);
  const std::string kind_text = RequireString(json, "kind", root);
  auto kind = ParseKind(kind_text);
  if (!kind) {
    throw Error(ErrorCode::kValidation, "unknown kind '" + kind_text + "'",
                "/kind");
  }
  std::vector<AnswerPart> parts;
  const Json& jparts = RequireArray(json, "parts", root);
  for (std::size_t i = 0; i < jparts.size(); ++i) {
    const std::string path = "/parts/" + std::to_string(i);
    RejectUnknownFields(jparts[i], {"kind", "payload", "provenance"}, path);
    AnswerPart part{
        ParsePartKind(RequireString(jparts[i], "kind", path), path + "/kind"),
        RequireField(jparts[i], "payload", path),
        {}};
    const Json& prov = RequireField(jparts[i], "provenance", path);
    part.provenance.module = RequireString(prov, "module", path + "/provenance");
    part.provenance.artifact =
        RequireString(prov, "artifact", path + "/provenance");
    part.provenance.ids = RequireArray(prov, "ids", path + "/provenance")
                              .get<std::vector<std::string>>();
    parts.push_back(std::move(part));
  }
  return AnswerBundle(
      RequireString(json, "question", root), *kind,
      AnnotationFromJson(RequireField(json, "annotation", root),
                         "/annotation"),
      RequireString(json, "patient_id", root), std::move(parts));
}

RenderFormat ParseRenderFormat(std::string_view name) {
  if (name == "json") return RenderFormat::kJson;
  if (name == "text") return RenderFormat::kText;
  throw Error(ErrorCode::kConfig,
              "unknown format '" + std::string(name) + "' (json or text)",
              "format");
}

std::string Render(const AnswerBundle& bundle, RenderFormat format) {
  if (format == RenderFormat::kJson) return DumpCanonical(ToJson(bundle));
  const QuestionAnnotation& a = bundle.annotation();
  std::string out = std::string(KindLabel(bundle.kind())) + ". " +
                    bundle.question() + "\n";
  out += "Source: " + std::string(SourceName(a.source)) +
         "; Relevance: " + std::string(RelevanceName(a.relevance)) +
         "; Contextualization: " + DimensionsText(a.dimensions) + "\n";
  if (!bundle.patient_id().empty()) {
    out += "Patient: " + bundle.patient_id() + "\n";
  }
  const auto& parts = bundle.parts();
  for (std::size_t i = 0; i < parts.size(); ++i) {
    out += "\n" + RenderPart(parts[i]) + " [" + std::to_string(i + 1) + "]\n";
  }
  out += "\nSources:\n";
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const Provenance& p = parts[i].provenance;
    out += "[" + std::to_string(i + 1) + "] " + p.module + " " + p.artifact;
    for (std::size_t k = 0; k < p.ids.size(); ++k) {
      out += (k == 0 ? ": " : ", ") + p.ids[k];
    }
    out += "\n";
  }
  return out;
}

}  // namespace ckdctx::context
