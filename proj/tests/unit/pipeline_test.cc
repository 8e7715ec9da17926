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


#include <filesystem>
#include <string>

#include "ckdctx/common/error.h"
#include "ckdctx/pipeline/config.h"
#include "ckdctx/pipeline/loaded.h"
#include "ckdctx/pipeline/report.h"
#include "ckdctx/pipeline/stages.h"
#include "ckdctx/pipeline/workspace.h"
#include "gtest/gtest.h"

namespace ckdctx::pipeline {
namespace {

namespace fs = std::filesystem;

template <typename Fn>
Error ErrorOf(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "no error raised";
  return Error(ErrorCode::kIo, "");
}

const fs::path kData = CKDCTX_DATA_DIR;

fs::path TempDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ckdctx_pipeline_" + name);
  fs::remove_all(dir);
  return dir;
}

// Small enough to run every stage in a few seconds.
PipelineConfig SmallConfig(std::uint64_t seed = 3) {
  Json json = {
      {"seed", seed},
      {"synth", {{"n_patients", 600}, {"n_ccs_features", 12}}},
      {"train",
       {{"LR", {{"epochs", 5}}},
        {"MLP", {{"epochs", 5}, {"hidden_sizes", {8}}}}}},
      {"explain", {{"n_samples", 100}, {"max_patients", 8}}},
      {"prototypes", {{"k", 5}}},
  };
  return PipelineConfig::FromJson(json, kData);
}

Snapshot RunAll(Workspace& ws, const PipelineConfig& config) {
  ws.Commit(RunGenerateData(config));
  ws.Commit(RunBuildCohort(config, ws.Current()));
  ws.Commit(RunTrain(config, ws.Current(), risk::ModelKind::kLR));
  ws.Commit(RunTrain(config, ws.Current(), risk::ModelKind::kMLP));
  ws.Commit(RunExplain(config, ws.Current()));
  ws.Commit(RunPrototypes(config, ws.Current()));
  return ws.Commit(RunIngest(config));
}

TEST(PipelineConfigTest, ShippedConfigLoadsAndSeedsEveryStage) {
  const PipelineConfig c = PipelineConfig::Load(kData / "config.json");
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.Synth().seed, 7u);
  EXPECT_EQ(c.Train(risk::ModelKind::kMLP).seed, 7u);
  EXPECT_EQ(c.Explain().seed, 7u);
  EXPECT_TRUE(c.Train(risk::ModelKind::kLR).hidden_sizes.empty());
  EXPECT_EQ(c.Train(risk::ModelKind::kLR).kind, risk::ModelKind::kLR);
  EXPECT_TRUE(fs::exists(c.ccs_map));
  EXPECT_TRUE(fs::exists(c.guideline_html));
  EXPECT_EQ(c.Synth().planted_weights.size(), 30u);
  PipelineConfig reseeded = c;
  reseeded.seed = 8;
  EXPECT_EQ(reseeded.Synth().planted_weights,
            cohort::DefaultPlantedWeights(30, 8));
  EXPECT_EQ(c.prototypes.k, 20u);
}

TEST(PipelineConfigTest, RoundTripsThroughJson) {
  const PipelineConfig c = PipelineConfig::Load(kData / "config.json");
  const PipelineConfig again = PipelineConfig::FromJson(c.ToJson(), "/");
  EXPECT_EQ(DumpCanonical(again.ToJson()), DumpCanonical(c.ToJson()));
}

TEST(PipelineConfigTest, ErrorsNameTheKey) {
  Error e = ErrorOf([] {
    PipelineConfig::FromJson({{"explain", {{"modle", "MLP"}}}}, kData);
  });
  EXPECT_EQ(e.path(), "/explain/modle");
  e = ErrorOf(
      [] { PipelineConfig::FromJson({{"synth", {{"seed", 3}}}}, kData); });
  EXPECT_EQ(e.code(), ErrorCode::kConfig);
  EXPECT_EQ(e.path(), "/synth/seed");
  e = ErrorOf([] { PipelineConfig::FromJson({{"train", {{"SVM", {}}}}}, kData); });
  EXPECT_EQ(e.code(), ErrorCode::kConfig);
  e = ErrorOf([] { PipelineConfig::FromJson({{"seed", -1}}, kData); });
  EXPECT_EQ(e.path(), "/seed");
  e = ErrorOf([] {
    PipelineConfig::FromJson({{"service", {{"workers", 0}}}}, kData);
  });
  EXPECT_EQ(e.path(), "/service/workers");
}

TEST(WorkspaceTest, EmptyWorkspaceNamesMissingJob) {
  Workspace ws(TempDir("empty"));
  const Snapshot s = ws.Current();
  EXPECT_EQ(s.sequence(), 0u);
  const Error e = ErrorOf([&] { s.Read("model_MLP.json"); });
  EXPECT_EQ(e.code(), ErrorCode::kDependency);
  EXPECT_EQ(e.path(), "model_MLP.json");
  EXPECT_NE(std::string(e.what()).find("train"), std::string::npos);
}

TEST(WorkspaceTest, CommittedSnapshotsAreImmutable) {
  Workspace ws(TempDir("commit"));
  const Snapshot first = ws.Commit({{"a.json", "1\n"}, {"b.json", "2\n"}});
  const Snapshot second = ws.Commit({{"a.json", "3\n"}});
  EXPECT_EQ(first.sequence(), 1u);
  EXPECT_EQ(second.sequence(), 2u);
  EXPECT_EQ(first.Read("a.json"), "1\n");
  EXPECT_EQ(second.Read("a.json"), "3\n");
  EXPECT_EQ(second.Read("b.json"), "2\n");
  EXPECT_EQ(first.manifest().artifacts.at("b.json"),
            second.manifest().artifacts.at("b.json"));
  EXPECT_EQ(ws.Current().sequence(), 2u);
  // A second handle on the same root sees the swapped manifest.
  Workspace other(ws.root());
  EXPECT_EQ(other.Current().Read("a.json"), "3\n");
  EXPECT_EQ(ErrorOf([&] { ws.Commit({{"../x", ""}}); }).code(),
            ErrorCode::kInput);
}

TEST(WorkspaceTest, ManifestRejectsOtherVersions) {
  Json m = Manifest{}.ToJson();
  m["format_version"] = 2;
  EXPECT_EQ(ErrorOf([&] { Manifest::FromJson(m); }).code(),
            ErrorCode::kUnsupportedVersion);
}

TEST(StagesTest, SameSeedGivesByteIdenticalArtifacts) {
  Workspace a(TempDir("det_a"));
  Workspace b(TempDir("det_b"));
  const Snapshot sa = RunAll(a, SmallConfig());
  const Snapshot sb = RunAll(b, SmallConfig());
  ASSERT_EQ(sa.manifest().artifacts.size(), 12u);
  for (const auto& [name, hash] : sa.manifest().artifacts) {
    EXPECT_EQ(sa.Read(name), sb.Read(name)) << name;
  }
  Workspace c(TempDir("det_c"));
  c.Commit(RunGenerateData(SmallConfig(4)));
  EXPECT_NE(c.Current().Read(kClaims), sa.Read(kClaims));
}

TEST(StagesTest, PoolIsOrderedAndPrototypesComeFromIt) {
  Workspace ws(TempDir("pool"));
  const PipelineConfig config = SmallConfig();
  const Snapshot s = RunAll(ws, config);
  const cohort::FeatureMatrix features = LoadFeatures(s);
  const risk::Split split = LoadSplit(s, features.size());
  const risk::RiskModel model = LoadModel(s, risk::ModelKind::kMLP);
  const auto pool = HighRiskPool(model, features, split, 0.99, 7);
  ASSERT_GE(pool.size(), 7u);
  for (std::size_t i = 1; i < pool.size(); ++i) {
    EXPECT_GE(model.PredictProba(features.rows[pool[i - 1]]),
              model.PredictProba(features.rows[pool[i]]));
  }
  const auto full = HighRiskPool(model, features, split, 0.5, 5);
  const context::PrototypeStore protos =
      SelectPrototypes(config, cohort::CcsMap::Load(config.ccs_map.string()),
                       model, features, split, 3);
  EXPECT_EQ(protos.patient_ids.size(), 3u);
  EXPECT_EQ(protos.summary.n, 3);
  for (const std::string& id : protos.patient_ids) {
    const int row = features.FindPatient(id);
    EXPECT_NE(std::find(full.begin(), full.end(),
                        static_cast<std::size_t>(row)),
              full.end());
  }
}

TEST(ReportTest, MissingModelIsNamed) {
  Workspace ws(TempDir("report_missing"));
  const PipelineConfig config = SmallConfig();
  ws.Commit(RunGenerateData(config));
  ws.Commit(RunBuildCohort(config, ws.Current()));
  LoadedStores loaded(config, ws.Current());
  ReportSpec spec;
  spec.sections = {ReportSection::kMetrics};
  const Error e = ErrorOf([&] { RenderReport(loaded, spec); });
  EXPECT_EQ(e.code(), ErrorCode::kDependency);
  EXPECT_NE(std::string(e.what()).find("model LR"), std::string::npos);
  spec.sections.clear();
  EXPECT_EQ(ErrorOf([&] { RenderReport(loaded, spec); }).code(),
            ErrorCode::kConfig);
}

TEST(ReportTest, SectionsRenderInFixedOrder) {
  Workspace ws(TempDir("report"));
  const PipelineConfig config = SmallConfig();
  RunAll(ws, config);
  LoadedStores loaded(config, ws.Current());
  ReportSpec spec;
  spec.sections = {ReportSection::kQuestionFlow, ReportSection::kMetrics,
                   ReportSection::kAggregateImportance,
                   ReportSection::kPrototypes};
  const std::string md = RenderReport(loaded, spec);
  const auto metrics = md.find("| Method | Precision | Recall | AUC-ROC");
  const auto protos = md.find("| Feature | Count (%) |");
  const auto aggregate = md.find("| Rank | Feature | Mean abs phi |");
  const auto flow = md.find("| Question | Annotation | Answer |");
  ASSERT_NE(flow, std::string::npos);
  EXPECT_LT(metrics, protos);
  EXPECT_LT(protos, aggregate);
  EXPECT_LT(aggregate, flow);
  for (const char* label : {"Q1.", "Q2.", "Q3.", "Q3a.", "Q4.", "Q5.", "Q6."}) {
    EXPECT_NE(md.find(std::string("| ") + label), std::string::npos) << label;
  }
  EXPECT_NE(md.find("should not be delayed"), std::string::npos);
  EXPECT_EQ(RenderReport(loaded, spec), md);

  spec.format = ReportFormat::kJson;
  const Json js = ParseJson(RenderReport(loaded, spec), "report");
  EXPECT_EQ(js["sections"]["metrics"].size(), 2u);
  EXPECT_EQ(js["sections"]["question_flow"]["answers"].size(), 7u);
  EXPECT_EQ(ParseReportSection("aggregate_importance"),
            ReportSection::kAggregateImportance);
  EXPECT_EQ(ErrorOf([] { ParseReportSection("tables"); }).code(),
            ErrorCode::kConfig);
}

}  // namespace
}  // namespace ckdctx::pipeline
