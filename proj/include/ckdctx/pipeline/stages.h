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


#ifndef CKDCTX_PIPELINE_STAGES_H_
#define CKDCTX_PIPELINE_STAGES_H_

#include <string>
#include <string_view>
#include <vector>

#include "ckdctx/cohort/ccs_map.h"
#include "ckdctx/cohort/features.h"
#include "ckdctx/context/stores.h"
#include "ckdctx/guideline/parser.h"
#include "ckdctx/pipeline/config.h"
#include "ckdctx/pipeline/workspace.h"
#include "ckdctx/risk/model.h"
#include "ckdctx/risk/split.h"

namespace ckdctx::pipeline {

// Artifact file names.
inline constexpr const char* kClaims = "claims.ndjson";
inline constexpr const char* kCohort = "cohort.json";
inline constexpr const char* kFeatures = "features.json";
inline constexpr const char* kSplit = "split.json";
inline constexpr const char* kExplanations = "explanations.json";
inline constexpr const char* kPrototypes = "prototypes.json";
inline constexpr const char* kGuidelines = "guidelines.json";
inline constexpr const char* kGuidelineReport = "guidelines_report.json";
std::string ModelArtifact(risk::ModelKind kind);    // "model_MLP.json"
std::string MetricsArtifact(risk::ModelKind kind);  // "metrics_MLP.json"

// Each stage is a pure function of its inputs; the CLI and the service both
// call these, which is what keeps their artifacts byte-identical.
Artifacts GenerateData(const PipelineConfig& config,
                       const cohort::CcsMap& ccs_map);
Artifacts BuildCohort(const PipelineConfig& config,
                      const cohort::CcsMap& ccs_map,
                      std::string_view claims_ndjson);
// Model plus its test-split metrics.
Artifacts TrainModel(const PipelineConfig& config, risk::ModelKind kind,
                     const cohort::FeatureMatrix& features,
                     const risk::Split& split);
Artifacts EvaluateModel(const risk::RiskModel& model,
                        const cohort::FeatureMatrix& features,
                        const risk::Split& split);

// High-risk test rows ordered by risk (descending, ties by patient id):
// every test row at or above the threshold, topped up with the next
// highest rows so the pool holds at least `min_size` when possible.
std::vector<std::size_t> HighRiskPool(const risk::RiskModel& model,
                                      const cohort::FeatureMatrix& features,
                                      const risk::Split& split,
                                      double threshold, std::size_t min_size);

context::ExplanationStore ExplainPool(const PipelineConfig& config,
                                      const risk::RiskModel& model,
                                      const cohort::FeatureMatrix& features,
                                      const risk::Split& split);
context::PrototypeStore SelectPrototypes(const PipelineConfig& config,
                                         const cohort::CcsMap& ccs_map,
                                         const risk::RiskModel& model,
                                         const cohort::FeatureMatrix& features,
                                         const risk::Split& split,
                                         std::size_t k);
Artifacts BuildExplanations(const PipelineConfig& config,
                            const risk::RiskModel& model,
                            const cohort::FeatureMatrix& features,
                            const risk::Split& split);
Artifacts BuildPrototypes(const PipelineConfig& config,
                          const cohort::CcsMap& ccs_map,
                          const risk::RiskModel& model,
                          const cohort::FeatureMatrix& features,
                          const risk::Split& split);
Artifacts IngestGuidelines(std::string_view html,
                           const guideline::ParseConfig& parse_config);

// Snapshot-reading wrappers. Missing inputs raise kDependency naming the
// artifact.
cohort::FeatureMatrix LoadFeatures(const Snapshot& snapshot);
risk::Split LoadSplit(const Snapshot& snapshot, std::size_t n_rows);
risk::RiskModel LoadModel(const Snapshot& snapshot, risk::ModelKind kind);

// One module operation each, reading inputs from `snapshot`.
Artifacts RunGenerateData(const PipelineConfig& config);
Artifacts RunBuildCohort(const PipelineConfig& config,
                         const Snapshot& snapshot);
Artifacts RunTrain(const PipelineConfig& config, const Snapshot& snapshot,
                   risk::ModelKind kind);
Artifacts RunEvaluate(const PipelineConfig& config, const Snapshot& snapshot,
                      risk::ModelKind kind);
Artifacts RunExplain(const PipelineConfig& config, const Snapshot& snapshot);
Artifacts RunPrototypes(const PipelineConfig& config,
                        const Snapshot& snapshot);
Artifacts RunIngest(const PipelineConfig& config);

}  // namespace ckdctx::pipeline

#endif  // CKDCTX_PIPELINE_STAGES_H_
