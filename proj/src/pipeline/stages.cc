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


#include "ckdctx/pipeline/stages.h"

#include <algorithm>

#include "ckdctx/cohort/cohort.h"
#include "ckdctx/cohort/synth.h"
#include "ckdctx/common/error.h"
#include "ckdctx/explain/protodash.h"
#include "ckdctx/explain/summary.h"
#include "ckdctx/guideline/document.h"
#include "ckdctx/risk/metrics.h"
#include "ckdctx/risk/train.h"

namespace ckdctx::pipeline {

std::string ModelArtifact(risk::ModelKind kind) {
  return "model_" + std::string(risk::ModelKindName(kind)) + ".json";
}

std::string MetricsArtifact(risk::ModelKind kind) {
  return "metrics_" + std::string(risk::ModelKindName(kind)) + ".json";
}

Artifacts GenerateData(const PipelineConfig& config,
                       const cohort::CcsMap& ccs_map) {
  return {{kClaims,
           cohort::WriteNdjson(cohort::GenerateClaims(config.Synth(), ccs_map))}};
}

Artifacts BuildCohort(const PipelineConfig& config,
                      const cohort::CcsMap& ccs_map,
                      std::string_view claims_ndjson) {
  const cohort::Cohort selected =
      cohort::SelectCohort(cohort::ReadNdjson(claims_ndjson), config.cohort);
  const cohort::FeatureMatrix features = cohort::BuildFeatures(
      selected, ccs_map, config.cohort, config.features);
  const risk::Split split =
      risk::SplitData(features.size(), config.split, config.seed);
  Json audit = selected.AuditJson();
  audit["format_version"] = 1;
  audit["features"] = features.width();
  audit["dropped_features"] = features.dropped_features;
  int positives = 0;
  for (int label : features.labels) positives += label;
  audit["positives"] = positives;
  Json split_json = risk::ToJson(split);
  split_json["format_version"] = 1;
  Json features_json = cohort::ToJson(features);
  return {{kCohort, DumpCanonical(audit)},
          {kFeatures, DumpCanonical(features_json)},
          {kSplit, DumpCanonical(split_json)}};
}

Artifacts EvaluateModel(const risk::RiskModel& model,
                        const cohort::FeatureMatrix& features,
                        const risk::Split& split) {
  const risk::MetricsReport report =
      risk::Evaluate(model, features.rows, features.labels, split.test);
  return {{MetricsArtifact(model.kind()), DumpCanonical(risk::ToJson(report))}};
}

Artifacts TrainModel(const PipelineConfig& config, risk::ModelKind kind,
                     const cohort::FeatureMatrix& features,
                     const risk::Split& split) {
  const risk::RiskModel model =
      risk::Train(features.rows, features.labels, features.feature_names,
                  split, config.Train(kind));
  Artifacts out = EvaluateModel(model, features, split);
  out[ModelArtifact(kind)] = DumpCanonical(model.ToJson());
  return out;
}

std::vector<std::size_t> HighRiskPool(const risk::RiskModel& model,
                                      const cohort::FeatureMatrix& features,
                                      const risk::Split& split,
                                      double threshold, std::size_t min_size) {
  std::vector<std::pair<double, std::size_t>> scored;
  for (std::size_t row : split.test) {
    scored.emplace_back(model.PredictProba(features.rows[row]), row);
  }
  std::sort(scored.begin(), scored.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return features.patient_ids[a.second] < features.patient_ids[b.second];
  });
  std::vector<std::size_t> pool;
  for (const auto& [risk, row] : scored) {
    if (risk < threshold && pool.size() >= min_size) break;
    pool.push_back(row);
  }
  return pool;
}

context::ExplanationStore ExplainPool(const PipelineConfig& config,
                                      const risk::RiskModel& model,
                                      const cohort::FeatureMatrix& features,
                                      const risk::Split& split) {
  context::ExplanationStore store;
  store.reference = explain::MeanReference(features.rows, split.train);
  store.options = config.Explain();
  std::vector<std::size_t> pool =
      HighRiskPool(model, features, split, config.explain.high_risk_threshold,
                   config.prototypes.k);
  if (pool.size() > config.explain.max_patients) {
    pool.resize(config.explain.max_patients);
  }
  for (std::size_t row : pool) {
    const std::string& id = features.patient_ids[row];
    store.by_patient[id] = explain::ExplainPatient(
        model, features.rows[row], store.reference, id, store.options);
  }
  return store;
}

context::PrototypeStore SelectPrototypes(const PipelineConfig& config,
                                         const cohort::CcsMap& ccs_map,
                                         const risk::RiskModel& model,
                                         const cohort::FeatureMatrix& features,
                                         const risk::Split& split,
                                         std::size_t k) {
  if (k == 0) {
    throw Error(ErrorCode::kInput, "k must be positive", "k");
  }
  const std::vector<std::size_t> pool =
      HighRiskPool(model, features, split, config.explain.high_risk_threshold,
                   config.prototypes.k);
  explain::Rows rows;
  for (std::size_t row : pool) rows.push_back(features.rows[row]);
  context::PrototypeStore store;
  store.set = explain::ProtoDash(
      rows, rows, std::min(k, rows.size()),
      {explain::MedianPairwiseDistance(rows)});
  explain::Rows selected;
  for (std::size_t i : store.set.indices) {
    store.patient_ids.push_back(features.patient_ids[pool[i]]);
    selected.push_back(rows[i]);
  }
  store.summary = explain::SummarizePrototypes(
      selected, features.feature_names, features.ccs_codes, ccs_map,
      config.prototypes.high_prevalence_percent);
  return store;
}

Artifacts BuildExplanations(const PipelineConfig& config,
                            const risk::RiskModel& model,
                            const cohort::FeatureMatrix& features,
                            const risk::Split& split) {
  return {{kExplanations,
           DumpCanonical(context::ToJson(
               ExplainPool(config, model, features, split)))}};
}

Artifacts BuildPrototypes(const PipelineConfig& config,
                          const cohort::CcsMap& ccs_map,
                          const risk::RiskModel& model,
                          const cohort::FeatureMatrix& features,
                          const risk::Split& split) {
  return {{kPrototypes,
           DumpCanonical(context::ToJson(SelectPrototypes(
               config, ccs_map, model, features, split,
               config.prototypes.k)))}};
}

Artifacts IngestGuidelines(std::string_view html,
                           const guideline::ParseConfig& parse_config) {
  const guideline::ParseResult result = guideline::ParseHtml(html, parse_config);
  guideline::RequireValid(result.doc);
  const Json report = {{"format_version", 1},
                       {"doc_id", result.doc.doc_id},
                       {"chapters", result.doc.chapters.size()},
                       {"recommendations", result.doc.RecommendationCount()},
                       {"skipped", guideline::ToJson(result.skipped)}};
  return {{kGuidelines, DumpCanonical(guideline::ToJson(result.doc))},
          {kGuidelineReport, DumpCanonical(report)}};
}

cohort::FeatureMatrix LoadFeatures(const Snapshot& snapshot) {
  return cohort::FeatureMatrixFromJson(snapshot.ReadJson(kFeatures));
}

risk::Split LoadSplit(const Snapshot& snapshot, std::size_t n_rows) {
  return risk::SplitFromJson(snapshot.ReadJson(kSplit), n_rows);
}

risk::RiskModel LoadModel(const Snapshot& snapshot, risk::ModelKind kind) {
  return risk::RiskModel::FromJson(snapshot.ReadJson(ModelArtifact(kind)));
}

Artifacts RunGenerateData(const PipelineConfig& config) {
  return GenerateData(config, cohort::CcsMap::Load(config.ccs_map.string()));
}

Artifacts RunBuildCohort(const PipelineConfig& config,
                         const Snapshot& snapshot) {
  return BuildCohort(config, cohort::CcsMap::Load(config.ccs_map.string()),
                     snapshot.Read(kClaims));
}

Artifacts RunTrain(const PipelineConfig& config, const Snapshot& snapshot,
                   risk::ModelKind kind) {
  const cohort::FeatureMatrix features = LoadFeatures(snapshot);
  return TrainModel(config, kind, features, LoadSplit(snapshot, features.size()));
}

Artifacts RunEvaluate(const PipelineConfig&, const Snapshot& snapshot,
                      risk::ModelKind kind) {
  const risk::RiskModel model = LoadModel(snapshot, kind);
  const cohort::FeatureMatrix features = LoadFeatures(snapshot);
  return EvaluateModel(model, features, LoadSplit(snapshot, features.size()));
}

Artifacts RunExplain(const PipelineConfig& config, const Snapshot& snapshot) {
  const risk::RiskModel model = LoadModel(snapshot, config.explain.model);
  const cohort::FeatureMatrix features = LoadFeatures(snapshot);
  return BuildExplanations(config, model, features,
                           LoadSplit(snapshot, features.size()));
}

Artifacts RunPrototypes(const PipelineConfig& config,
                        const Snapshot& snapshot) {
  const risk::RiskModel model = LoadModel(snapshot, config.explain.model);
  const cohort::FeatureMatrix features = LoadFeatures(snapshot);
  return BuildPrototypes(config, cohort::CcsMap::Load(config.ccs_map.string()),
                         model, features, LoadSplit(snapshot, features.size()));
}

Artifacts RunIngest(const PipelineConfig& config) {
  return IngestGuidelines(
      ReadFile(config.guideline_html),
      guideline::ParseConfig::FromJson(
          ReadJsonFile(config.guideline_parse_config)));
}

}  // namespace ckdctx::pipeline
