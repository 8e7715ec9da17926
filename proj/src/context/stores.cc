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

#include "ckdctx/context/stores.h"

#include "ckdctx/common/error.h"

namespace ckdctx::context {

Json ToJson(const ExplanationStore& store) {
  Json attributions = Json::array();
  for (const auto& [id, a] : store.by_patient) {
    attributions.push_back(explain::ToJson(a));
  }
  return {{"format_version", 1},
          {"reference", store.reference},
          {"options", explain::ToJson(store.options)},
          {"attributions", std::move(attributions)}};
}

ExplanationStore ExplanationStoreFromJson(const Json& json) {
  const std::string root;
  if (RequireInt(json, "format_version", root) != 1) {
    throw Error(ErrorCode::kUnsupportedVersion,
                "explanations format_version is not supported",
                "/format_version");
  }
  ExplanationStore store;
  store.reference =
      RequireArray(json, "reference", root).get<std::vector<double>>();
  store.options =
      explain::ExplainOptionsFromJson(RequireField(json, "options", root));
  for (const Json& a : RequireArray(json, "attributions", root)) {
    explain::Attribution attribution = explain::AttributionFromJson(a);
    const std::string id = attribution.patient_id;
    if (!store.by_patient.emplace(id, std::move(attribution)).second) {
      throw Error(ErrorCode::kValidation,
                  "duplicate attribution for patient " + id, "/attributions");
    }
  }
  return store;
}

Json ToJson(const PrototypeStore& store) {
  return {{"format_version", 1},
          {"prototypes", explain::ToJson(store.set)},
          {"patient_ids", store.patient_ids},
          {"summary", explain::ToJson(store.summary)}};
}

PrototypeStore PrototypeStoreFromJson(const Json& json) {
  const std::string root;
  if (RequireInt(json, "format_version", root) != 1) {
    throw Error(ErrorCode::kUnsupportedVersion,
                "prototypes format_version is not supported",
                "/format_version");
  }
  PrototypeStore store;
  store.set =
      explain::PrototypeSetFromJson(RequireField(json, "prototypes", root));
  store.patient_ids =
      RequireArray(json, "patient_ids", root).get<std::vector<std::string>>();
  store.summary =
      explain::PrototypeSummaryFromJson(RequireField(json, "summary", root));
  if (store.patient_ids.size() != store.set.indices.size()) {
    throw Error(ErrorCode::kValidation,
                "patient_ids and prototype indices differ in length",
                "/patient_ids");
  }
  return store;
}

}  // namespace ckdctx::context
