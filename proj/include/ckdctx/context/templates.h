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

#ifndef CKDCTX_CONTEXT_TEMPLATES_H_
#define CKDCTX_CONTEXT_TEMPLATES_H_

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ckdctx/common/json_util.h"

namespace ckdctx::context {

using Slots = std::map<std::string, std::string>;

// Kind label -> template string with {slot} placeholders, in three tables:
// the displayed question, the query sent to the answerer and the answer
// text.
struct Templates {
  std::map<std::string, std::string> questions;
  std::map<std::string, std::string> queries;
  std::map<std::string, std::string> answers;

  // Throws kConfig naming the missing entry.
  const std::string& Question(std::string_view kind) const;
  const std::string& Query(std::string_view kind) const;
  const std::string& AnswerText(std::string_view kind) const;
  bool Has(std::string_view template_id) const;  // "answers.Q4"

  static Templates FromJson(const Json& json);
  Json ToJson() const;

  friend bool operator==(const Templates&, const Templates&) = default;
};

// Placeholder names in order of appearance.
std::vector<std::string> TemplateSlots(std::string_view text);
// Throws kRender for a placeholder without a value or an unclosed brace.
std::string FillTemplate(std::string_view text, const Slots& slots);

// A lab threshold flag: raised from a recorded lab value when one exists,
// otherwise from any of the proxy CCS indicators.
struct LabRule {
  std::string name;  // "High HbA1C"
  std::string lab;   // key in the lab override file, "a1c"
  double threshold = 0.0;
  std::vector<int> proxy_ccs;

  std::string Label() const;  // "High HbA1C (≥ 10)"
  friend bool operator==(const LabRule&, const LabRule&) = default;
};

struct ContextOptions {
  int top_features = 20;
  int top_conditions = 5;
  int comorbidity_groups = 2;
  int answers_per_query = 1;
  std::string drug_class = "GLP-1 RA";
  std::vector<LabRule> lab_rules = {{"High HbA1C", "a1c", 10.0, {50}}};

  static ContextOptions FromJson(const Json& json);
  Json ToJson() const;
  friend bool operator==(const ContextOptions&, const ContextOptions&) =
      default;
};

// patient_id -> lab -> value.
using LabValues = std::map<std::string, std::map<std::string, double>>;
LabValues LabValuesFromJson(const Json& json);

}  // namespace ckdctx::context

#endif  // CKDCTX_CONTEXT_TEMPLATES_H_
