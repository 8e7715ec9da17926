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


#ifndef CKDCTX_PIPELINE_LOADED_H_
#define CKDCTX_PIPELINE_LOADED_H_

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ckdctx/cohort/ccs_map.h"
#include "ckdctx/context/stores.h"
#include "ckdctx/pipeline/config.h"
#include "ckdctx/pipeline/workspace.h"
#include "ckdctx/risk/metrics.h"
#include "ckdctx/risk/split.h"

namespace ckdctx::pipeline {

// Every artifact of one snapshot parsed into memory, plus the resource
// files named by the config. Absent artifacts leave the matching store
// null. Not copyable: `stores()` points into the members.
class LoadedStores {
 public:
  LoadedStores(const PipelineConfig& config, Snapshot snapshot);
  LoadedStores(const LoadedStores&) = delete;
  LoadedStores& operator=(const LoadedStores&) = delete;

  const Snapshot& snapshot() const { return snapshot_; }
  const PipelineConfig& config() const { return config_; }
  const context::Stores& stores() const { return stores_; }
  const cohort::CcsMap& ccs_map() const { return ccs_map_; }

  const risk::Split* split() const { return split_ ? &*split_ : nullptr; }
  const risk::RiskModel* model(risk::ModelKind kind) const;
  const risk::MetricsReport* metrics(risk::ModelKind kind) const;

  // Store accessors that raise kDependency naming the store and the job
  // that builds it.
  const cohort::FeatureMatrix& RequireFeatures() const;
  const risk::Split& RequireSplit() const;
  const risk::RiskModel& RequireModel(risk::ModelKind kind) const;
  const risk::RiskModel& RequireModel() const;  // the explained model
  const context::ExplanationStore& RequireExplanations() const;
  const context::PrototypeStore& RequirePrototypes() const;
  const guideline::GuidelineDoc& RequireGuidelines() const;

  // Highest-risk explained patient (ties by id); the default subject of
  // patient-specific questions.
  std::string DefaultPatient() const;

 private:
  PipelineConfig config_;
  Snapshot snapshot_;
  cohort::CcsMap ccs_map_;
  context::Templates templates_;
  std::optional<context::LabValues> labs_;
  std::optional<cohort::FeatureMatrix> features_;
  std::optional<risk::Split> split_;
  std::map<risk::ModelKind, risk::RiskModel> models_;
  std::map<risk::ModelKind, risk::MetricsReport> metrics_;
  std::optional<context::ExplanationStore> explanations_;
  std::optional<context::PrototypeStore> prototypes_;
  std::optional<guideline::GuidelineDoc> guidelines_;
  std::unique_ptr<qa::LexicalAnswerer> answerer_;
  context::Stores stores_;
};

}  // namespace ckdctx::pipeline

#endif  // CKDCTX_PIPELINE_LOADED_H_
