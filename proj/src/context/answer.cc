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

#include "ckdctx/context/answer.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "ckdctx/common/error.h"
#include "ckdctx/explain/aggregate.h"

namespace ckdctx::context {
namespace {

template <typename T>
const T& Need(const T* store, const char* name) {
  if (store == nullptr) {
    throw Error(ErrorCode::kDependency,
                std::string("store '") + name + "' is not loaded", name);
  }
  return *store;
}

void NeedGuidelines(const Stores& s) {
  Need(s.guidelines, "guidelines");
  Need(s.answerer, "guidelines");
}

const risk::RiskModel& NeedModel(const Stores& s) {
  const risk::RiskModel& model = Need(s.model, "model");
  if (s.features != nullptr && model.feature_names() !=
                                   s.features->feature_names) {
    throw Error(ErrorCode::kDependency,
                "model features do not match the feature store", "model");
  }
  return model;
}

struct PatientRef {
  std::string id;
  const std::vector<double>* row;
};

PatientRef FindPatient(const Stores& s, const std::string& patient_id) {
  const cohort::FeatureMatrix& features = Need(s.features, "features");
  if (patient_id.empty()) {
    throw Error(ErrorCode::kInput, "this question needs a patient_id",
                "patient_id");
  }
  const int row = features.FindPatient(patient_id);
  if (row < 0) {
    throw Error(ErrorCode::kNotFound, "unknown patient '" + patient_id + "'",
                "patient_id");
  }
  return {patient_id, &features.rows[static_cast<std::size_t>(row)]};
}

std::string FeatureLabel(const Stores& s, std::size_t column) {
  const cohort::FeatureMatrix& f = *s.features;
  if (s.ccs_map != nullptr && column < f.ccs_codes.size()) {
    return s.ccs_map->Name(f.ccs_codes[column]);
  }
  return f.feature_names[column];
}

AnswerPart RiskPart(const Stores& s, const PatientRef& p) {
  const risk::RiskModel& model = NeedModel(s);
  const double risk = model.PredictProba(*p.row);
  return {PartKind::kRiskScore,
          {{"patient_id", p.id},
           {"risk", risk},
           {"display", FormatFixed(risk, 2)},
           {"model_kind", risk::ModelKindName(model.kind())}},
          {"risk_models", "model", {s.model_id, p.id}}};
}

struct Condition {
  std::string group;
  double frequency = 0.0;
  std::vector<int> ccs;
};

// The patient's CCS groups ordered by how common each group is across the
// cohort, most common first.
std::vector<Condition> TopConditions(const Stores& s, const PatientRef& p,
                                     int limit) {
  const cohort::FeatureMatrix& f = *s.features;
  const cohort::CcsMap& map = Need(s.ccs_map, "ccs_map");
  std::map<std::string, std::vector<std::size_t>> group_columns;
  for (std::size_t j = 0; j < f.ccs_codes.size(); ++j) {
    group_columns[map.Level1(f.ccs_codes[j])].push_back(j);
  }
  std::vector<Condition> out;
  for (const auto& [group, columns] : group_columns) {
    Condition c{group, 0.0, {}};
    for (std::size_t j : columns) {
      if ((*p.row)[j] > 0.0) c.ccs.push_back(f.ccs_codes[j]);
    }
    if (c.ccs.empty()) continue;
    std::size_t with_group = 0;
    for (const auto& row : f.rows) {
      for (std::size_t j : columns) {
        if (row[j] > 0.0) {
          ++with_group;
          break;
        }
      }
    }
    c.frequency = static_cast<double>(with_group) /
                  static_cast<double>(std::max<std::size_t>(1, f.size()));
    out.push_back(std::move(c));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Condition& a, const Condition& b) {
                     return a.frequency > b.frequency;
                   });
  if (out.size() > static_cast<std::size_t>(limit)) out.resize(limit);
  return out;
}

Json LabFlags(const Stores& s, const PatientRef& p) {
  const cohort::FeatureMatrix& f = *s.features;
  Json flags = Json::array();
  for (const LabRule& rule : s.options.lab_rules) {
    if (s.labs != nullptr) {
      auto patient = s.labs->find(p.id);
      if (patient != s.labs->end()) {
        auto lab = patient->second.find(rule.lab);
        if (lab != patient->second.end()) {
          if (lab->second >= rule.threshold) {
            flags.push_back({{"flag", rule.Label()},
                             {"lab", rule.lab},
                             {"source", "lab"},
                             {"value", lab->second}});
          }
          continue;
        }
      }
    }
    std::vector<std::string> evidence;
    for (int code : rule.proxy_ccs) {
      const int column = f.FeatureIndex(cohort::CcsFeatureName(code));
      if (column >= 0 && (*p.row)[static_cast<std::size_t>(column)] > 0.0) {
        evidence.push_back(cohort::CcsFeatureName(code));
      }
    }
    if (!evidence.empty()) {
      flags.push_back({{"flag", rule.Label()},
                       {"lab", rule.lab},
                       {"source", "proxy"},
                       {"evidence", evidence}});
    }
  }
  return flags;
}

AnswerPart CohortStatPart(const Stores& s, const PatientRef& p,
                          const std::vector<Condition>& conditions) {
  Json jconditions = Json::array();
  for (const Condition& c : conditions) {
    Json ccs = Json::array();
    for (int code : c.ccs) {
      ccs.push_back({{"code", code}, {"name", s.ccs_map->Name(code)}});
    }
    jconditions.push_back({{"group", c.group},
                           {"cohort_frequency", c.frequency},
                           {"ccs", std::move(ccs)}});
  }
  return {PartKind::kCohortStat,
          {{"patient_id", p.id},
           {"lab_flags", LabFlags(s, p)},
           {"conditions", std::move(jconditions)},
           {"proxy_derived", true}},
          {"cohort", "features", {p.id}}};
}

std::string JoinNatural(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += i + 1 == items.size() ? " and " : ", ";
    out += items[i];
  }
  return out;
}

std::string ComorbidityList(const std::vector<Condition>& conditions,
                            int limit) {
  std::vector<std::string> names;
  for (const Condition& c : conditions) {
    if (static_cast<int>(names.size()) == limit) break;
    names.push_back(c.group);
  }
  return names.empty() ? "no recorded comorbidities" : JoinNatural(names);
}

// Slot values available to question and query templates.
Slots PatientSlots(const Stores& s, const PatientRef& p) {
  Slots slots = {{"drug_class", s.options.drug_class},
                 {"patient_id", p.id}};
  for (const LabRule& rule : s.options.lab_rules) {
    double value = rule.threshold;
    if (s.labs != nullptr) {
      auto patient = s.labs->find(p.id);
      if (patient != s.labs->end()) {
        auto lab = patient->second.find(rule.lab);
        if (lab != patient->second.end()) value = lab->second;
      }
    }
    slots[rule.lab] = FormatDouble(value);
  }
  if (s.ccs_map != nullptr) {
    slots["complications"] = ComorbidityList(
        TopConditions(s, p, s.options.comorbidity_groups),
        s.options.comorbidity_groups);
  }
  return slots;
}

std::vector<AnswerPart> GuidelineParts(const Stores& s,
                                       const std::string& query,
                                       bool positive_only) {
  std::vector<AnswerPart> parts;
  const auto answers = s.answerer->Ask(
      query, static_cast<std::size_t>(s.options.answers_per_query));
  int rank = 0;
  for (const qa::RankedAnswer& a : answers) {
    ++rank;
    if (positive_only && a.total() <= 0.0) continue;
    const guideline::Recommendation* rec =
        s.guidelines->FindRecommendation(a.rec_id);
    Json payload = qa::ToJson(a);
    payload["text"] = a.answer_text;
    payload.erase("answer_text");
    payload["grade"] =
        rec != nullptr ? guideline::GradeName(rec->grade) : "Ungraded";
    payload["rank"] = rank;
    payload["query"] = query;
    parts.push_back({PartKind::kGuidelineText, std::move(payload),
                     {"guideline_ingest", "guidelines", {a.rec_id}}});
  }
  return parts;
}

std::string SectionId(const guideline::Chapter& ch,
                      const guideline::FreeTextSection& section) {
  return "section:" + ch.chapter_id + ":" + section.title;
}

AnswerBundle AnswerPrototypes(const Stores& s, const std::string& question) {
  const PrototypeStore& protos = Need(s.prototypes, "prototypes");
  Need(s.explanations, "explanations");
  Json summary = explain::ToJson(protos.summary);
  summary["patient_ids"] = protos.patient_ids;
  summary["table"] = protos.summary.RenderText();
  std::vector<AnswerPart> parts;
  parts.push_back({PartKind::kPrototypeSummary, std::move(summary),
                   {"explainers", "prototypes", protos.patient_ids}});

  std::vector<explain::Attribution> attributions;
  for (const std::string& id : protos.patient_ids) {
    attributions.push_back(AttributionFor(s, id));
  }
  Json entries = Json::array();
  for (const auto& e : explain::AggregateImportance(
           attributions, static_cast<std::size_t>(s.options.top_features))) {
    const int column = s.features->FeatureIndex(e.feature);
    entries.push_back(
        {{"feature", e.feature},
         {"label", FeatureLabel(s, static_cast<std::size_t>(column))},
         {"mean_abs_phi", e.mean_abs_phi}});
  }
  parts.push_back({PartKind::kFeatureImportance,
                   {{"scope", "prototypes"}, {"entries", std::move(entries)}},
                   {"explainers", "explanations", protos.patient_ids}});
  return AnswerBundle(question, QuestionKind::kPrototypeOverview,
                      Annotation(QuestionKind::kPrototypeOverview), "",
                      std::move(parts));
}

AnswerBundle AnswerRiskRationale(const Stores& s, const PatientRef& p,
                                 const std::string& question) {
  Need(s.explanations, "explanations");
  std::vector<AnswerPart> parts = {RiskPart(s, p)};
  const explain::Attribution a = AttributionFor(s, p.id);
  std::vector<std::size_t> order(a.phi.size());
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x,
                                                   std::size_t y) {
    const double ax = std::abs(a.phi[x]);
    const double ay = std::abs(a.phi[y]);
    if (ax != ay) return ax > ay;
    return a.feature_names[x] < a.feature_names[y];
  });
  order.resize(std::min<std::size_t>(order.size(), s.options.top_features));
  Json entries = Json::array();
  for (std::size_t j : order) {
    entries.push_back({{"feature", a.feature_names[j]},
                       {"label", FeatureLabel(s, j)},
                       {"value", a.feature_values[j]},
                       {"phi", a.phi[j]}});
  }
  parts.push_back(
      {PartKind::kFeatureImportance,
       {{"scope", "patient"},
        {"patient_id", p.id},
        {"method", a.method == explain::ShapleyMethod::kExact ? "exact"
                                                               : "sampled"},
        {"baseline_value", a.baseline_value},
        {"prediction", a.prediction},
        {"entries", std::move(entries)}},
       {"explainers", "explanations", {p.id}}});
  return AnswerBundle(question, QuestionKind::kRiskRationale,
                      Annotation(QuestionKind::kRiskRationale), p.id,
                      std::move(parts));
}

AnswerBundle AnswerDescription(const Stores& s, const PatientRef& p,
                               const std::string& question) {
  const Templates& templates = Need(s.templates, "templates");
  Need(s.ccs_map, "ccs_map");
  const auto conditions = TopConditions(s, p, s.options.top_conditions);
  std::vector<AnswerPart> parts = {CohortStatPart(s, p, conditions)};
  std::vector<std::string> flags;
  for (const Json& f : parts[0].payload["lab_flags"]) {
    flags.push_back(f["flag"].get<std::string>());
  }
  std::string condition_list;
  for (const Condition& c : conditions) {
    if (!condition_list.empty()) condition_list += "; ";
    condition_list += c.group;
    for (int code : c.ccs) condition_list += " | " + s.ccs_map->Name(code);
  }
  const Slots slots = {
      {"lab_flags", flags.empty() ? "No lab flags" : JoinNatural(flags)},
      {"condition_list",
       condition_list.empty() ? "none recorded" : condition_list}};
  parts.push_back({PartKind::kTemplatedText,
                   {{"template_id", "answers.Q3"},
                    {"text", FillTemplate(templates.AnswerText("Q3"), slots)},
                    {"slots", slots},
                    {"slot_parts", {{"lab_flags", 0}, {"condition_list", 0}}}},
                   {"contextualizer", "templates", {"answers.Q3"}}});
  return AnswerBundle(question, QuestionKind::kPatientDescription,
                      Annotation(QuestionKind::kPatientDescription), p.id,
                      std::move(parts));
}

AnswerBundle AnswerDrugViability(const Stores& s, const PatientRef& p,
                                 const std::string& question,
                                 const Slots& slots) {
  const Templates& templates = Need(s.templates, "templates");
  NeedGuidelines(s);
  Need(s.ccs_map, "ccs_map");
  std::vector<AnswerPart> parts = {RiskPart(s, p)};
  const auto conditions = TopConditions(s, p, s.options.comorbidity_groups);
  parts.push_back(CohortStatPart(s, p, conditions));
  for (AnswerPart& g :
       GuidelineParts(s, FillTemplate(templates.Query("Q4"), slots), false)) {
    parts.push_back(std::move(g));
  }
  for (const guideline::Chapter& ch : s.guidelines->chapters) {
    for (const guideline::FreeTextSection& section : ch.free_text_sections) {
      if (section.text.find(s.options.drug_class) == std::string::npos) {
        continue;
      }
      parts.push_back({PartKind::kGuidelineText,
                       {{"section", section.title}, {"text", section.text}},
                       {"guideline_ingest", "guidelines",
                        {SectionId(ch, section)}}});
    }
  }
  const Slots answer_slots = {
      {"drug_class", s.options.drug_class},
      {"risk", parts[0].payload["display"].get<std::string>()},
      {"comorbidity_list",
       ComorbidityList(conditions, s.options.comorbidity_groups)}};
  parts.push_back(
      {PartKind::kTemplatedText,
       {{"template_id", "answers.Q4"},
        {"text", FillTemplate(templates.AnswerText("Q4"), answer_slots)},
        {"slots", answer_slots},
        {"slot_parts", {{"risk", 0}, {"comorbidity_list", 1}}}},
       {"contextualizer", "templates", {"answers.Q4"}}});
  return AnswerBundle(question, QuestionKind::kDrugViability,
                      Annotation(QuestionKind::kDrugViability), p.id,
                      std::move(parts));
}

AnswerBundle AnswerGuidelineQuery(const Stores& s, QuestionKind kind,
                                  const PatientRef& p,
                                  const std::string& question,
                                  const Slots& slots) {
  const Templates& templates = Need(s.templates, "templates");
  NeedGuidelines(s);
  std::vector<AnswerPart> parts;
  if (kind == QuestionKind::kComplicationTreatment) {
    parts.push_back(RiskPart(s, p));
  }
  for (AnswerPart& g : GuidelineParts(
           s, FillTemplate(templates.Query(KindLabel(kind)), slots), false)) {
    parts.push_back(std::move(g));
  }
  return AnswerBundle(question, kind, Annotation(kind), p.id,
                      std::move(parts));
}

AnswerBundle AnswerFreeText(const Stores& s, std::string_view text,
                            const std::string& patient_id) {
  NeedGuidelines(s);
  if (!patient_id.empty()) FindPatient(s, patient_id);
  std::vector<AnswerPart> parts = GuidelineParts(s, std::string(text), true);
  if (parts.empty()) {
    throw Error(ErrorCode::kQuery,
                "no guideline text matches the question", "question");
  }
  return AnswerBundle(std::string(text), QuestionKind::kFreeText,
                      Annotation(QuestionKind::kFreeText), patient_id,
                      std::move(parts));
}

}  // namespace

explain::Attribution AttributionFor(const Stores& s,
                                    const std::string& patient_id) {
  const ExplanationStore& store = Need(s.explanations, "explanations");
  auto it = store.by_patient.find(patient_id);
  if (it != store.by_patient.end()) return it->second;
  const risk::RiskModel& model = NeedModel(s);
  const PatientRef p = FindPatient(s, patient_id);
  if (store.reference.size() != p.row->size()) {
    throw Error(ErrorCode::kDependency,
                "explanation reference width does not match the features",
                "explanations");
  }
  return explain::ExplainPatient(model, *p.row, store.reference, patient_id,
                                 store.options);
}

AnswerBundle Answer(QuestionKind kind, const std::string& patient_id,
                    const Stores& stores, std::string_view free_text) {
  if (kind == QuestionKind::kFreeText) {
    return AnswerFreeText(stores, free_text, patient_id);
  }
  const Templates& templates = Need(stores.templates, "templates");
  const std::string label(KindLabel(kind));
  if (kind == QuestionKind::kPrototypeOverview) {
    return AnswerPrototypes(stores, FillTemplate(templates.Question(label), {}));
  }
  const PatientRef p = FindPatient(stores, patient_id);
  const Slots slots = PatientSlots(stores, p);
  const std::string question = FillTemplate(templates.Question(label), slots);
  switch (kind) {
    case QuestionKind::kRiskRationale:
      return AnswerRiskRationale(stores, p, question);
    case QuestionKind::kPatientDescription:
      return AnswerDescription(stores, p, question);
    case QuestionKind::kDrugViability:
      return AnswerDrugViability(stores, p, question, slots);
    default:
      return AnswerGuidelineQuery(stores, kind, p, question, slots);
  }
}

std::vector<std::string> DanglingProvenance(const AnswerBundle& bundle,
                                            const Stores& s) {
  std::vector<std::string> out;
  auto patient_known = [&](const std::string& id) {
    return s.features != nullptr && s.features->FindPatient(id) >= 0;
  };
  for (std::size_t i = 0; i < bundle.parts().size(); ++i) {
    const Provenance& p = bundle.parts()[i].provenance;
    const std::string where = "part " + std::to_string(i) + " (" +
                              p.artifact + ")";
    auto fail = [&](const std::string& id) {
      out.push_back(where + ": " + id);
    };
    if (p.artifact == "model") {
      if (s.model == nullptr || p.ids.empty() || p.ids[0] != s.model_id) {
        fail(p.ids.empty() ? "<none>" : p.ids[0]);
      }
      for (std::size_t k = 1; k < p.ids.size(); ++k) {
        if (!patient_known(p.ids[k])) fail(p.ids[k]);
      }
    } else if (p.artifact == "features" || p.artifact == "explanations") {
      for (const auto& id : p.ids) {
        if (!patient_known(id) ||
            (p.artifact == "explanations" && s.explanations == nullptr)) {
          fail(id);
        }
      }
    } else if (p.artifact == "prototypes") {
      for (const auto& id : p.ids) {
        if (s.prototypes == nullptr ||
            std::find(s.prototypes->patient_ids.begin(),
                      s.prototypes->patient_ids.end(),
                      id) == s.prototypes->patient_ids.end()) {
          fail(id);
        }
      }
    } else if (p.artifact == "guidelines") {
      for (const auto& id : p.ids) {
        bool found = false;
        if (s.guidelines != nullptr) {
          found = s.guidelines->FindRecommendation(id) != nullptr;
          for (const auto& ch : s.guidelines->chapters) {
            for (const auto& section : ch.free_text_sections) {
              found = found || SectionId(ch, section) == id;
            }
          }
        }
        if (!found) fail(id);
      }
    } else if (p.artifact == "templates") {
      for (const auto& id : p.ids) {
        if (s.templates == nullptr || !s.templates->Has(id)) fail(id);
      }
    } else {
      fail("unknown artifact");
    }
  }
  return out;
}

}  // namespace ckdctx::context
