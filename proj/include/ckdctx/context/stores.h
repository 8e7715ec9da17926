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

#ifndef CKDCTX_CONTEXT_STORES_H_
#define CKDCTX_CONTEXT_STORES_H_

#include <map>
#include <string>
#include <vector>

#include "ckdctx/cohort/ccs_map.h"
#include "ckdctx/cohort/features.h"
#include "ckdctx/common/json_util.h"
#include "ckdctx/context/templates.h"
#include "ckdctx/explain/protodash.h"
#include "ckdctx/explain/shapley.h"
#include "ckdctx/explain/summary.h"
#include "ckdctx/guideline/document.h"
#include "ckdctx/qa/answerer.h"
#include "ckdctx/risk/model.h"

namespace ckdctx::context {

// Per-patient attributions against one shared reference input. Patients
// missing from `by_patient` are explained on demand with the same options.
struct ExplanationStore {
  std::vector<double> reference;
  explain::ExplainOptions options;
  std::map<std::string, explain::Attribution> by_patient;

  friend bool operator==(const ExplanationStore&,
                         const ExplanationStore&) = default;
};

Json ToJson(const ExplanationStore& store);
ExplanationStore ExplanationStoreFromJson(const Json& json);

// Selected prototypes, the patients they index and their summary table.
struct PrototypeStore {
  explain::PrototypeSet set;
  std::vector<std::string> patient_ids;
  explain::PrototypeSummary summary;

  friend bool operator==(const PrototypeStore&, const PrototypeStore&) =
      default;
};

Json ToJson(const PrototypeStore& store);
PrototypeStore PrototypeStoreFromJson(const Json& json);

// Read-only views over one snapshot. Null members are stores that are not
// loaded; handlers needing them raise kDependency naming the store.
struct Stores {
  const cohort::FeatureMatrix* features = nullptr;
  const cohort::CcsMap* ccs_map = nullptr;
  const risk::RiskModel* model = nullptr;
  std::string model_id;
  const ExplanationStore* explanations = nullptr;
  const PrototypeStore* prototypes = nullptr;
  const guideline::GuidelineDoc* guidelines = nullptr;
  const qa::Answerer* answerer = nullptr;  // over `guidelines`
  const Templates* templates = nullptr;
  const LabValues* labs = nullptr;  // optional overrides
  ContextOptions options;
};

}  // namespace ckdctx::context

#endif  // CKDCTX_CONTEXT_STORES_H_
