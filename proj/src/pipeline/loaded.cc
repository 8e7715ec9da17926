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


#include "ckdctx/pipeline/loaded.h"

#include "ckdctx/common/error.h"
#include "ckdctx/guideline/document.h"
#include "ckdctx/pipeline/stages.h"

namespace ckdctx::pipeline {
namespace {

[[noreturn]] void Missing(const std::string& store,
                          const std::string& artifact) {
  throw Error(ErrorCode::kDependency,
              store + " is not built (" + artifact + "); run the " +
                  ProducingJob(artifact) + " job",
              store);
}

}  // namespace

LoadedStores::LoadedStores(const PipelineConfig& config, Snapshot snapshot)
    : config_(config),
      snapshot_(std::move(snapshot)),
      ccs_map_(cohort::CcsMap::Load(config.ccs_map.string())),
      templates_(context::Templates::FromJson(
          ReadJsonFile(config.templates))) {
  if (!config_.labs.empty()) {
    labs_ = context::LabValuesFromJson(ReadJsonFile(config_.labs));
  }
  if (snapshot_.Has(kFeatures)) features_ = LoadFeatures(snapshot_);
  if (features_ && snapshot_.Has(kSplit)) {
    split_ = LoadSplit(snapshot_, features_->size());
  }
  for (risk::ModelKind kind : {risk::ModelKind::kLR, risk::ModelKind::kMLP}) {
    if (snapshot_.Has(ModelArtifact(kind))) {
      models_.emplace(kind, LoadModel(snapshot_, kind));
    }
    if (snapshot_.Has(MetricsArtifact(kind))) {
      metrics_.emplace(kind, risk::MetricsFromJson(
                                 snapshot_.ReadJson(MetricsArtifact(kind))));
    }
  }
  if (snapshot_.Has(kExplanations)) {
    explanations_ = context::ExplanationStoreFromJson(
        snapshot_.ReadJson(kExplanations));
  }
  if (snapshot_.Has(kPrototypes)) {
    prototypes_ =
        context::PrototypeStoreFromJson(snapshot_.ReadJson(kPrototypes));
  }
  if (snapshot_.Has(kGuidelines)) {
    guidelines_ =
        guideline::GuidelineDocFromJson(snapshot_.ReadJson(kGuidelines));
    answerer_ = std::make_unique<qa::LexicalAnswerer>(
        guideline::ToPassages(*guidelines_));
  }

  stores_.features = features_ ? &*features_ : nullptr;
  stores_.ccs_map = &ccs_map_;
  stores_.model = model(config_.explain.model);
  stores_.model_id = std::string(risk::ModelKindName(config_.explain.model));
  stores_.explanations = explanations_ ? &*explanations_ : nullptr;
  stores_.prototypes = prototypes_ ? &*prototypes_ : nullptr;
  stores_.guidelines = guidelines_ ? &*guidelines_ : nullptr;
  stores_.answerer = answerer_.get();
  stores_.templates = &templates_;
  stores_.labs = labs_ ? &*labs_ : nullptr;
  stores_.options = config_.context;
}

const risk::RiskModel* LoadedStores::model(risk::ModelKind kind) const {
  auto it = models_.find(kind);
  return it == models_.end() ? nullptr : &it->second;
}

const risk::MetricsReport* LoadedStores::metrics(risk::ModelKind kind) const {
  auto it = metrics_.find(kind);
  return it == metrics_.end() ? nullptr : &it->second;
}

const cohort::FeatureMatrix& LoadedStores::RequireFeatures() const {
  if (!features_) Missing("features", kFeatures);
  return *features_;
}

const risk::Split& LoadedStores::RequireSplit() const {
  if (!split_) Missing("split", kSplit);
  return *split_;
}

const risk::RiskModel& LoadedStores::RequireModel(risk::ModelKind kind) const {
  const risk::RiskModel* m = model(kind);
  if (m == nullptr) Missing("model", ModelArtifact(kind));
  return *m;
}

const risk::RiskModel& LoadedStores::RequireModel() const {
  return RequireModel(config_.explain.model);
}

const context::ExplanationStore& LoadedStores::RequireExplanations() const {
  if (!explanations_) Missing("explanations", kExplanations);
  return *explanations_;
}

const context::PrototypeStore& LoadedStores::RequirePrototypes() const {
  if (!prototypes_) Missing("prototypes", kPrototypes);
  return *prototypes_;
}

const guideline::GuidelineDoc& LoadedStores::RequireGuidelines() const {
  if (!guidelines_) Missing("guidelines", kGuidelines);
  return *guidelines_;
}

std::string LoadedStores::DefaultPatient() const {
  const context::ExplanationStore& store = RequireExplanations();
  const risk::RiskModel& m = RequireModel();
  const cohort::FeatureMatrix& features = RequireFeatures();
  std::string best;
  double best_risk = -1.0;
  for (const auto& [id, attribution] : store.by_patient) {
    const int row = features.FindPatient(id);
    if (row < 0) continue;
    const double r = m.PredictProba(features.rows[row]);
    if (r > best_risk) {  // map order breaks ties by id
      best_risk = r;
      best = id;
    }
  }
  if (best.empty()) {
    throw Error(ErrorCode::kNotFound, "no explained patient in the features",
                "patient_id");
  }
  return best;
}

}  // namespace ckdctx::pipeline
