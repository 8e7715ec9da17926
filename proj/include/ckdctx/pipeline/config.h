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


#ifndef CKDCTX_PIPELINE_CONFIG_H_
#define CKDCTX_PIPELINE_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ckdctx/cohort/features.h"
#include "ckdctx/cohort/synth.h"
#include "ckdctx/cohort/types.h"
#include "ckdctx/common/json_util.h"
#include "ckdctx/context/templates.h"
#include "ckdctx/explain/shapley.h"
#include "ckdctx/risk/split.h"
#include "ckdctx/risk/train.h"

namespace ckdctx::pipeline {

struct ExplainStageConfig {
  risk::ModelKind model = risk::ModelKind::kMLP;
  explain::ExplainOptions options;
  // Test patients at or above this risk form the pool that is explained and
  // summarised by prototypes.
  double high_risk_threshold = 0.5;
  std::size_t max_patients = 100;
};

struct PrototypeStageConfig {
  std::size_t k = 20;
  int high_prevalence_percent = 50;
};

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  int workers = 1;
  std::string token;  // bearer token; empty disables auth
};

// One file drives every stage. Relative resource paths resolve against the
// directory holding the config file. The master seed replaces the seed of
// every stage so a single value reproduces the whole run.
struct PipelineConfig {
  std::uint64_t seed = 7;
  std::filesystem::path data_dir = "workspace";
  std::filesystem::path ccs_map = "ccs_map.json";
  std::filesystem::path templates = "templates.json";
  std::filesystem::path guideline_html = "guidelines/ada_fixture.html";
  std::filesystem::path guideline_parse_config =
      "guidelines/parse_config.json";
  std::filesystem::path labs;  // optional lab overrides
  cohort::SynthConfig synth;
  // Planted weights not listed in the file are drawn from the seed.
  bool default_planted_weights = true;
  cohort::CohortConfig cohort;
  cohort::FeatureConfig features;
  risk::SplitFractions split;
  std::map<risk::ModelKind, risk::TrainConfig> train;
  ExplainStageConfig explain;
  PrototypeStageConfig prototypes;
  context::ContextOptions context;
  ServiceConfig service;
  std::vector<risk::ModelKind> report_models{risk::ModelKind::kLR,
                                             risk::ModelKind::kMLP};

  // Seeded per-stage views.
  cohort::SynthConfig Synth() const;
  risk::TrainConfig Train(risk::ModelKind kind) const;
  explain::ExplainOptions Explain() const;

  // Unknown keys are rejected with their path.
  static PipelineConfig FromJson(const Json& json,
                                 const std::filesystem::path& base_dir);
  static PipelineConfig Load(const std::filesystem::path& path);
  Json ToJson() const;
};

}  // namespace ckdctx::pipeline

#endif  // CKDCTX_PIPELINE_CONFIG_H_
