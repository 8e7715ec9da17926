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

#include "ckdctx/context/templates.h"

#include "ckdctx/common/error.h"

namespace ckdctx::context {
namespace {

const std::string& Lookup(const std::map<std::string, std::string>& table,
                          std::string_view table_name, std::string_view kind) {
  auto it = table.find(std::string(kind));
  if (it == table.end()) {
    const std::string id =
        std::string(table_name) + "." + std::string(kind);
    throw Error(ErrorCode::kConfig, "template " + id + " is missing", id);
  }
  return it->second;
}

std::map<std::string, std::string> StringMap(const Json& json,
                                             const std::string& key) {
  std::map<std::string, std::string> out;
  if (!json.contains(key)) return out;
  const Json& obj = json[key];
  if (!obj.is_object()) {
    throw Error(ErrorCode::kValidation, "expected an object at /" + key,
                "/" + key);
  }
  for (const auto& [k, v] : obj.items()) {
    if (!v.is_string()) {
      throw Error(ErrorCode::kValidation,
                  "expected a string at /" + key + "/" + k, "/" + key + "/" + k);
    }
    out[k] = v.get<std::string>();
  }
  return out;
}

}  // namespace

const std::string& Templates::Question(std::string_view kind) const {
  return Lookup(questions, "questions", kind);
}
const std::string& Templates::Query(std::string_view kind) const {
  return Lookup(queries, "queries", kind);
}
const std::string& Templates::AnswerText(std::string_view kind) const {
  return Lookup(answers, "answers", kind);
}

bool Templates::Has(std::string_view template_id) const {
  const std::size_t dot = template_id.find('.');
  if (dot == std::string_view::npos) return false;
  const std::string table(template_id.substr(0, dot));
  const std::string kind(template_id.substr(dot + 1));
  if (table == "questions") return questions.count(kind) > 0;
  if (table == "queries") return queries.count(kind) > 0;
  if (table == "answers") return answers.count(kind) > 0;
  return false;
}

Templates Templates::FromJson(const Json& json) {
  const std::string root;
  const std::int64_t version = RequireInt(json, "format_version", root);
  if (version != 1) {
    throw Error(ErrorCode::kUnsupportedVersion,
                "templates format_version " + std::to_string(version) +
                    " is not supported",
                "/format_version");
  }
  RejectUnknownFields(json, {"format_version", "questions", "queries", "answers"},
                      root);
  Templates t;
  t.questions = StringMap(json, "questions");
  t.queries = StringMap(json, "queries");
  t.answers = StringMap(json, "answers");
  for (const auto* table : {&t.questions, &t.queries, &t.answers}) {
    for (const auto& [kind, text] : *table) TemplateSlots(text);
  }
  return t;
}

Json Templates::ToJson() const {
  return {{"format_version", 1},
          {"questions", questions},
          {"queries", queries},
          {"answers", answers}};
}

std::vector<std::string> TemplateSlots(std::string_view text) {
  std::vector<std::string> slots;
  std::size_t pos = 0;
  while ((pos = text.find('{', pos)) != std::string_view::npos) {
    const std::size_t end = text.find('}', pos);
    if (end == std::string_view::npos) {
      throw Error(ErrorCode::kRender,
                  "unclosed '{' in template '" + std::string(text) + "'");
    }
    slots.emplace_back(text.substr(pos + 1, end - pos - 1));
    pos = end + 1;
  }
  return slots;
}

std::string FillTemplate(std::string_view text, const Slots& slots) {
  std::string out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t open = text.find('{', pos);
    out.append(text.substr(pos, open - pos));
    if (open == std::string_view::npos) break;
    const std::size_t close = text.find('}', open);
    if (close == std::string_view::npos) {
      throw Error(ErrorCode::kRender,
                  "unclosed '{' in template '" + std::string(text) + "'");
    }
    const std::string name(text.substr(open + 1, close - open - 1));
    auto it = slots.find(name);
    if (it == slots.end()) {
      throw Error(ErrorCode::kRender, "no value for slot {" + name + "}", name);
    }
    out += it->second;
    pos = close + 1;
  }
  return out;
}

std::string LabRule::Label() const {
  return name + " (\xE2\x89\xA5 " + FormatDouble(threshold) + ")";
}

ContextOptions ContextOptions::FromJson(const Json& json) {
  const std::string root;
  RejectUnknownFields(json,
                      {"top_features", "top_conditions", "comorbidity_groups",
                       "answers_per_query", "drug_class", "lab_rules"},
                      root);
  ContextOptions o;
  auto positive = [&](const char* key, int& field) {
    if (!json.contains(key)) return;
    field = static_cast<int>(RequireInt(json, key, root));
    if (field < 1) {
      throw Error(ErrorCode::kConfig, std::string(key) + " must be positive",
                  key);
    }
  };
  positive("top_features", o.top_features);
  positive("top_conditions", o.top_conditions);
  positive("comorbidity_groups", o.comorbidity_groups);
  positive("answers_per_query", o.answers_per_query);
  if (json.contains("drug_class")) {
    o.drug_class = RequireString(json, "drug_class", root);
  }
  if (json.contains("lab_rules")) {
    o.lab_rules.clear();
    const Json& rules = RequireArray(json, "lab_rules", root);
    for (std::size_t i = 0; i < rules.size(); ++i) {
      const std::string path = "/lab_rules/" + std::to_string(i);
      RejectUnknownFields(rules[i], {"name", "lab", "threshold", "proxy_ccs"},
                          path);
      LabRule r;
      r.name = RequireString(rules[i], "name", path);
      r.lab = RequireString(rules[i], "lab", path);
      r.threshold = RequireNumber(rules[i], "threshold", path);
      r.proxy_ccs =
          RequireArray(rules[i], "proxy_ccs", path).get<std::vector<int>>();
      o.lab_rules.push_back(std::move(r));
    }
  }
  return o;
}

Json ContextOptions::ToJson() const {
  Json rules = Json::array();
  for (const LabRule& r : lab_rules) {
    rules.push_back({{"name", r.name},
                     {"lab", r.lab},
                     {"threshold", r.threshold},
                     {"proxy_ccs", r.proxy_ccs}});
  }
  return {{"top_features", top_features},
          {"top_conditions", top_conditions},
          {"comorbidity_groups", comorbidity_groups},
          {"answers_per_query", answers_per_query},
          {"drug_class", drug_class},
          {"lab_rules", std::move(rules)}};
}

LabValues LabValuesFromJson(const Json& json) {
  if (!json.is_object()) {
    throw Error(ErrorCode::kValidation, "lab values must be an object", "");
  }
  LabValues out;
  for (const auto& [patient, labs] : json.items()) {
    if (!labs.is_object()) {
      throw Error(ErrorCode::kValidation, "expected an object at /" + patient,
                  "/" + patient);
    }
    for (const auto& [lab, value] : labs.items()) {
      if (!value.is_number()) {
        const std::string path = "/" + patient + "/" + lab;
        throw Error(ErrorCode::kValidation, "expected a number at " + path,
                    path);
      }
      out[patient][lab] = value.get<double>();
    }
  }
  return out;
}

}  // namespace ckdctx::context
