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


// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failures, so ctest fails when any criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "ckdctx/cohort/ccs_map.h"
#include "ckdctx/cohort/cohort.h"
#include "ckdctx/cohort/synth.h"
#include "ckdctx/common/error.h"
#include "ckdctx/common/json_util.h"
#include "ckdctx/common/rng.h"
#include "ckdctx/context/answer.h"
#include "ckdctx/context/bundle.h"
#include "ckdctx/context/routing.h"
#include "ckdctx/context/templates.h"
#include "ckdctx/explain/protodash.h"
#include "ckdctx/explain/shapley.h"
#include "ckdctx/explain/summary.h"
#include "ckdctx/guideline/document.h"
#include "ckdctx/guideline/parser.h"
#include "ckdctx/pipeline/config.h"
#include "ckdctx/pipeline/stages.h"
#include "ckdctx/pipeline/workspace.h"
#include "ckdctx/qa/answerer.h"
#include "ckdctx/risk/metrics.h"
#include "ckdctx/risk/train.h"
#include "ckdctx/service/api.h"

namespace ckdctx {
namespace {

namespace fs = std::filesystem;

const fs::path kData = CKDCTX_DATA_DIR;

// Tolerances.
constexpr double kAucTieTol = 1e-9;
constexpr double kBrierTol = 1e-12;
constexpr double kVarianceTol = 1e-9;
constexpr double kMinLrAuc = 0.80;
constexpr double kMinMlpAuc = 0.85;
constexpr double kMinXorMargin = 0.05;
constexpr double kGradRelTol = 1e-4;
constexpr double kEfficiencyTol = 1e-6;
constexpr double kAxiomTol = 1e-9;
constexpr double kSampledTol = 0.01;
constexpr double kProtoRatio = 0.95;
constexpr int kSynthPatients = 5000;
constexpr int kSynthFeatures = 30;
constexpr std::uint64_t kSeed = 7;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  // Records a failed expectation; returns `ok`.
  bool Expect(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
    return ok;
  }
};

struct Criterion {
  std::string name;
  double budget_seconds;
  std::function<void(Outcome&)> run;
};

// ---- cohort

void CohortRules(Outcome& out) {
  const auto cases =
      cohort::ReadNdjson(ReadFile(kData / "fixtures/cohort_cases.ndjson"));
  out.Expect(cases.size() == 12, "12 fixture cases");
  using R = cohort::ExclusionReason;
  const std::map<std::string, std::optional<R>> expected = {
      {"C01", std::nullopt},           {"C02", std::nullopt},
      {"C03", std::nullopt},           {"C04", std::nullopt},
      {"C05", R::kInsufficientVisits}, {"C06", R::kInsufficientVisits},
      {"C07", R::kNotContinuouslyEnrolled},
      {"C08", R::kT1dDominant},        {"C09", R::kAgeOutOfRange},
      {"C10", R::kAgeOutOfRange},      {"C11", R::kPrevalentCkd},
      {"C12", R::kPrevalentCkd},
  };
  const cohort::CohortConfig config;
  int correct = 0;
  for (const auto& p : cases) {
    if (cohort::CheckEligibility(p, config) == expected.at(p.patient_id)) {
      ++correct;
    } else {
      out.Expect(false, p.patient_id + " criterion");
    }
  }
  const cohort::Cohort selected = cohort::SelectCohort(cases, config);
  std::vector<std::string> ids;
  std::vector<int> labels;
  for (const auto& m : selected.members) {
    ids.push_back(m.patient.patient_id);
    labels.push_back(cohort::LabelOutcome(m.patient, m.index_date, config));
  }
  out.Expect(ids == std::vector<std::string>{"C01", "C02", "C03", "C04"},
             "selected C01..C04");
  // C02 has CKD on index + 360, C03 on index + 361.
  out.Expect(labels == std::vector<int>{0, 1, 0, 1}, "horizon labels");
  out.detail << correct << "/12 cases, selected " << ids.size()
             << ", labels day 360 in / day 361 out";
}

// ---- metrics

void MetricOracle(Outcome& out) {
  const std::vector<double> s5 = {0.9, 0.7, 0.7, 0.3, 0.1};
  const std::vector<int> y5 = {1, 0, 1, 0, 0};
  const double auc = risk::AucRoc(s5, y5);
  const std::vector<double> s4 = {0.9, 0.8, 0.3, 0.2};
  const std::vector<int> y4 = {1, 1, 0, 0};
  const double brier = risk::BrierScore(s4, y4);
  Rng rng(kSeed);
  std::vector<int> y;
  for (int i = 0; i < 1000; ++i) y.push_back(rng.Bernoulli(0.23) ? 1 : 0);
  const double mean =
      std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  double variance = 0.0;
  for (int v : y) variance += (v - mean) * (v - mean);
  variance /= static_cast<double>(y.size());
  const double constant =
      risk::BrierScore(std::vector<double>(y.size(), mean), y);
  out.Expect(std::abs(auc - 5.5 / 6.0) < kAucTieTol, "tie AUC");
  out.Expect(std::abs(brier - 0.045) < kBrierTol, "Brier 0.045");
  out.Expect(std::abs(constant - variance) < kVarianceTol,
             "constant Brier = variance");
  out.detail << "AUC " << FormatFixed(auc, 12) << ", Brier "
             << FormatFixed(brier, 12) << ", constant-mean Brier - variance "
             << std::abs(constant - variance);
}

// ---- model sanity

double TestAuc(const pipeline::PipelineConfig& config, risk::ModelKind kind,
               const pipeline::Snapshot& snapshot) {
  const pipeline::Artifacts a = pipeline::RunTrain(config, snapshot, kind);
  return ParseJson(a.at(pipeline::MetricsArtifact(kind)), "metrics")["auc_roc"]
      .get<double>();
}

pipeline::Snapshot Prepare(const pipeline::PipelineConfig& config) {
  pipeline::Workspace ws(config.data_dir);
  ws.Commit(pipeline::RunGenerateData(config));
  ws.Commit(pipeline::RunBuildCohort(config, ws.Current()));
  return ws.Current();
}

void ModelSanity(Outcome& out) {
  const fs::path root = fs::temp_directory_path() / "ckdctx_accept_models";
  fs::remove_all(root);
  pipeline::PipelineConfig config =
      pipeline::PipelineConfig::Load(kData / "config.json");
  config.seed = kSeed;
  config.synth.n_patients = kSynthPatients;
  config.synth.n_ccs_features = kSynthFeatures;
  config.data_dir = (root / "planted").string();
  const pipeline::Snapshot planted = Prepare(config);
  const double lr = TestAuc(config, risk::ModelKind::kLR, planted);
  const double mlp = TestAuc(config, risk::ModelKind::kMLP, planted);

  // XOR variant: no main effects, three balanced pairwise interactions.
  pipeline::PipelineConfig xor_config = config;
  xor_config.default_planted_weights = false;
  xor_config.synth.planted_weights.assign(kSynthFeatures, 0.0);
  xor_config.synth.xor_terms = {{0, 1, 3.0}, {2, 3, 3.0}, {4, 5, 3.0}};
  xor_config.data_dir = (root / "xor").string();
  const pipeline::Snapshot xored = Prepare(xor_config);
  const double xor_lr = TestAuc(xor_config, risk::ModelKind::kLR, xored);
  const double xor_mlp = TestAuc(xor_config, risk::ModelKind::kMLP, xored);
  fs::remove_all(root);

  out.Expect(lr >= kMinLrAuc, "LR AUC");
  out.Expect(mlp >= kMinMlpAuc, "MLP AUC");
  out.Expect(xor_mlp >= xor_lr + kMinXorMargin, "XOR margin");
  out.detail << "planted LR " << FormatFixed(lr, 3) << " MLP "
             << FormatFixed(mlp, 3) << "; XOR LR " << FormatFixed(xor_lr, 3)
             << " MLP " << FormatFixed(xor_mlp, 3);
}

// ---- gradients

double MaxGradientError(const std::vector<int>& hidden, std::uint64_t seed) {
  Rng rng(seed);
  const int width = 6;
  risk::Rows rows;
  std::vector<int> labels;
  for (int i = 0; i < 16; ++i) {
    std::vector<double> x(width);
    for (double& v : x) v = rng.Normal();
    rows.push_back(x);
    labels.push_back(rng.Bernoulli(0.4) ? 1 : 0);
  }
  std::vector<risk::DenseLayer> layers = risk::InitLayers(width, hidden, seed);
  for (auto& layer : layers) {
    for (double& w : layer.weights) w += 0.3 * rng.Normal();
    for (double& b : layer.bias) b = 0.1 * rng.Normal();
  }
  std::vector<std::size_t> batch(rows.size());
  std::iota(batch.begin(), batch.end(), 0);
  const double pos_weight = 1.5;
  const auto analytic =
      risk::ComputeLossAndGradient(layers, rows, labels, batch, pos_weight);
  const double h = 1e-6;
  double worst = 0.0;
  auto check = [&](double* param, double grad) {
    const double saved = *param;
    *param = saved + h;
    const double up = risk::ComputeLoss(layers, rows, labels, batch, pos_weight);
    *param = saved - h;
    const double down =
        risk::ComputeLoss(layers, rows, labels, batch, pos_weight);
    *param = saved;
    const double numeric = (up - down) / (2 * h);
    const double denom = std::max({std::abs(numeric), std::abs(grad), 1e-8});
    worst = std::max(worst, std::abs(numeric - grad) / denom);
  };
  for (std::size_t l = 0; l < layers.size(); ++l) {
    for (std::size_t k = 0; k < layers[l].weights.size(); ++k) {
      check(&layers[l].weights[k], analytic.gradient[l].weights[k]);
    }
    for (std::size_t k = 0; k < layers[l].bias.size(); ++k) {
      check(&layers[l].bias[k], analytic.gradient[l].bias[k]);
    }
  }
  return worst;
}

void GradientCheck(Outcome& out) {
  double lr = 0.0, mlp = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    lr = std::max(lr, MaxGradientError({}, seed));
    mlp = std::max(mlp, MaxGradientError({8}, seed));
  }
  out.Expect(lr < kGradRelTol, "LR gradient");
  out.Expect(mlp < kGradRelTol, "MLP gradient");
  out.detail << "20 instances each, max rel error LR " << lr << " MLP " << mlp;
}

// ---- Shapley

risk::RiskModel RandomMlp(int width, std::uint64_t seed) {
  std::vector<risk::DenseLayer> layers = risk::InitLayers(width, {6}, seed);
  Rng rng(seed + 100);
  for (auto& layer : layers) {
    for (double& w : layer.weights) w += rng.Normal();
    for (double& b : layer.bias) b = 0.5 * rng.Normal();
  }
  std::vector<std::string> names;
  for (int j = 0; j < width; ++j) names.push_back("f" + std::to_string(j));
  return risk::RiskModel(risk::ModelKind::kMLP, layers, names, {});
}

void ShapleyAxioms(Outcome& out) {
  Rng rng(2024);
  double worst_efficiency = 0.0, worst_symmetry = 0.0, worst_null = 0.0;
  for (int instance = 0; instance < 50; ++instance) {
    // Pairwise game on d <= 10 players; 0 and 1 interchangeable, the last
    // one ignored.
    const int d = 3 + static_cast<int>(rng.Below(8));
    std::vector<double> w(d);
    std::vector<std::vector<double>> v(d, std::vector<double>(d, 0.0));
    for (int i = 0; i < d; ++i) w[i] = rng.Normal();
    for (int i = 0; i < d; ++i) {
      for (int j = i + 1; j < d; ++j) v[i][j] = v[j][i] = rng.Normal();
    }
    w[1] = w[0];
    for (int j = 2; j < d; ++j) v[1][j] = v[j][1] = v[0][j];
    w[d - 1] = 0.0;
    for (int j = 0; j < d; ++j) v[d - 1][j] = v[j][d - 1] = 0.0;
    const explain::ValueFunction f = [&](std::span<const double> z) {
      double s = 0.0;
      for (int i = 0; i < d; ++i) {
        s += w[i] * z[i];
        for (int j = i + 1; j < d; ++j) s += v[i][j] * z[i] * z[j];
      }
      return std::tanh(s);
    };
    std::vector<double> x(d), ref(d);
    for (int i = 0; i < d; ++i) {
      x[i] = rng.Normal();
      ref[i] = rng.Normal();
    }
    x[1] = x[0];
    ref[1] = ref[0];
    const explain::Attribution a = explain::ShapleyExact(f, x, ref);
    const double total = std::accumulate(a.phi.begin(), a.phi.end(), 0.0);
    worst_efficiency =
        std::max(worst_efficiency, std::abs(total - (f(x) - f(ref))));
    worst_symmetry = std::max(worst_symmetry, std::abs(a.phi[0] - a.phi[1]));
    worst_null = std::max(worst_null, std::abs(a.phi[d - 1]));
  }
  const risk::RiskModel model = RandomMlp(8, 17);
  std::vector<double> x(8), ref(8);
  for (int i = 0; i < 8; ++i) {
    x[i] = rng.Normal();
    ref[i] = rng.Normal();
  }
  const explain::Attribution exact = explain::ShapleyExact(model, x, ref);
  const explain::Attribution sampled =
      explain::ShapleySampled(model, x, ref, 20000, kSeed);
  double worst_sampled = 0.0;
  for (int j = 0; j < 8; ++j) {
    worst_sampled =
        std::max(worst_sampled, std::abs(exact.phi[j] - sampled.phi[j]));
  }
  out.Expect(worst_efficiency < kEfficiencyTol, "efficiency");
  out.Expect(worst_symmetry < kAxiomTol, "symmetry");
  out.Expect(worst_null < kAxiomTol, "null player");
  out.Expect(worst_sampled < kSampledTol, "sampled vs exact");
  out.detail << "50 games: efficiency " << worst_efficiency << ", symmetry "
             << worst_symmetry << ", null " << worst_null
             << "; sampled d=8 max gap " << FormatFixed(worst_sampled, 4);
}

// ---- ProtoDash

// Optimal nonnegative weights for a fixed pair, in closed form.
double BestPairObjective(const explain::Rows& points, std::size_t i,
                         std::size_t j, double bandwidth) {
  auto k = [&](std::size_t a, std::size_t b) {
    double d2 = 0.0;
    for (std::size_t t = 0; t < points[a].size(); ++t) {
      d2 += (points[a][t] - points[b][t]) * (points[a][t] - points[b][t]);
    }
    return std::exp(-d2 / (2 * bandwidth * bandwidth));
  };
  auto mu = [&](std::size_t a) {
    double s = 0.0;
    for (std::size_t t = 0; t < points.size(); ++t) s += k(a, t);
    return s / static_cast<double>(points.size());
  };
  const double mi = mu(i), mj = mu(j), kij = k(i, j);
  double best = std::max(mi * mi, mj * mj) / 2;
  const double det = 1 - kij * kij;
  if (det > 1e-14) {
    const double wi = (mi - kij * mj) / det;
    const double wj = (mj - kij * mi) / det;
    if (wi >= 0 && wj >= 0) {
      best = std::max(best, wi * mi + wj * mj -
                                0.5 * (wi * wi + wj * wj + 2 * kij * wi * wj));
    }
  }
  return best;
}

void ProtoDashCheck(Outcome& out) {
  Rng rng(77);
  double worst_ratio = 1e9;
  bool nonnegative = true, monotone = true;
  for (int trial = 0; trial < 100; ++trial) {
    explain::Rows points(30, std::vector<double>(3));
    for (auto& p : points) {
      for (double& v : p) v = rng.Normal();
    }
    const double bw = explain::MedianPairwiseDistance(points);
    const explain::PrototypeSet set = explain::ProtoDash(points, points, 2, {bw});
    double best = 0.0;
    for (std::size_t i = 0; i < 30; ++i) {
      for (std::size_t j = i + 1; j < 30; ++j) {
        best = std::max(best, BestPairObjective(points, i, j, bw));
      }
    }
    worst_ratio = std::min(worst_ratio, set.objective_trace.back() / best);
    for (double w : set.weights) nonnegative = nonnegative && w >= 0.0;
    for (std::size_t s = 1; s < set.objective_trace.size(); ++s) {
      monotone = monotone &&
                 set.objective_trace[s] >= set.objective_trace[s - 1];
    }
  }
  explain::Rows clusters;
  for (int c = 0; c < 2; ++c) {
    for (int i = 0; i < 20; ++i) {
      clusters.push_back({10.0 * c + 0.5 * rng.Normal(),
                          10.0 * c + 0.5 * rng.Normal()});
    }
  }
  const explain::PrototypeSet two =
      explain::ProtoDash(clusters, clusters, 2, {1.0});
  const bool split = two.indices.size() == 2 &&
                     (two.indices[0] < 20) != (two.indices[1] < 20);
  out.Expect(worst_ratio >= kProtoRatio, "greedy/brute ratio");
  out.Expect(nonnegative, "nonnegative weights");
  out.Expect(monotone, "nondecreasing trace");
  out.Expect(split, "one prototype per cluster");
  out.detail << "100 sets, worst greedy/best pair "
             << FormatFixed(worst_ratio, 4) << ", two-cluster split "
             << (split ? "yes" : "no");
}

// ---- guidelines

guideline::ParseResult ParseFixture() {
  return guideline::ParseHtml(
      ReadFile(kData / "guidelines/ada_fixture.html"),
      guideline::ParseConfig::FromJson(
          ReadJsonFile(kData / "guidelines/parse_config.json")));
}

void GuidelineParser(Outcome& out) {
  const guideline::GuidelineDoc doc = ParseFixture().doc;
  const std::string text = DumpCanonical(guideline::ToJson(doc));
  const guideline::GuidelineDoc back =
      guideline::GuidelineDocFromJson(ParseJson(text, "doc"));
  out.Expect(doc.RecommendationCount() == 17, "17 recommendations");
  out.Expect(doc.chapters.size() == 2, "2 chapters");
  out.Expect(back == doc && DumpCanonical(guideline::ToJson(back)) == text,
             "round trip");
  out.detail << doc.RecommendationCount() << " recommendations in "
             << doc.chapters.size() << " chapters, round trip identity";
}

// ---- numeric QA

void NumericQa(Outcome& out) {
  const qa::LexicalAnswerer answerer(guideline::ToPassages(ParseFixture().doc));
  const auto q3a =
      answerer.Ask("What should be done if A1C levels are greater than 10?", 3);
  const bool insulin =
      !q3a.empty() &&
      q3a[0].answer_text.find("early introduction of insulin") !=
          std::string::npos;
  out.Expect(insulin, "Q3a rank 1 is insulin introduction");
  out.Expect(!q3a.empty() && q3a[0].numeric_bonus > 0, "Q3a bonus > 0");

  // (7, inf) does not lie inside (10, inf).
  const auto loose = answerer.Ask(
      "What should be done if A1C levels are greater than 7?", 17);
  double loose_bonus = -1.0;
  for (const auto& a : loose) {
    if (!q3a.empty() && a.rec_id == q3a[0].rec_id) loose_bonus = a.numeric_bonus;
  }
  out.Expect(loose_bonus == 0.0, "(7,inf) vs (10,inf) bonus 0");

  const auto q6 = answerer.Ask(
      "What is typically done for patients not meeting treatment goals?", 1);
  const bool delayed = !q6.empty() && q6[0].answer_text.find(
                                          "should not be delayed") !=
                                          std::string::npos;
  out.Expect(delayed, "Q6 rank 1 is 'should not be delayed'");
  out.detail << "Q3a rank 1 " << (q3a.empty() ? "-" : q3a[0].rec_id)
             << " bonus " << (q3a.empty() ? 0.0 : q3a[0].numeric_bonus)
             << "; >7 bonus " << loose_bonus << "; Q6 rank 1 "
             << (q6.empty() ? "-" : q6[0].rec_id);
}

// ---- routing and the Q4 bundle

void Routing(Outcome& out) {
  using context::Dimension;
  using S = context::Source;
  using R = context::Relevance;
  const std::vector<std::pair<std::string, context::QuestionAnnotation>>
      table = {
          {"Q1", {S::kAlgorithmic, R::kBoth, {Dimension::kPostHocExplanation}}},
          {"Q2", {S::kAlgorithmic, R::kCkd, {Dimension::kRiskPrediction}}},
          {"Q3", {S::kAlgorithmic, R::kT2dm, {Dimension::kRiskPrediction}}},
          {"Q3a", {S::kGuidelines, R::kT2dm, {Dimension::kPatient}}},
          {"Q4",
           {S::kGuidelines,
            R::kBoth,
            {Dimension::kPatient, Dimension::kRiskPrediction}}},
          {"Q5",
           {S::kGuidelines,
            R::kBoth,
            {Dimension::kPatient, Dimension::kRiskPrediction}}},
          {"Q6", {S::kGuidelines, R::kT2dm, {Dimension::kPatient}}},
      };
  int cells = 0;
  for (const auto& [name, annotation] : table) {
    const context::Route route = context::RouteQuestion(name);
    if (route.annotation == annotation) {
      cells += 3;
    } else {
      out.Expect(false, name + " annotation");
    }
  }

  // One patient whose LR risk is 0.83 by construction.
  cohort::FeatureMatrix features;
  features.ccs_codes = {49, 50, 98};
  features.feature_names = {"CCS_049", "CCS_050", "CCS_098", "AGE_GRP_Y",
                            "AGE_GRP_M", "AGE_GRP_O", "SEX_FEMALE"};
  features.rows = {{1, 1, 1, 0, 0, 1, 1}, {1, 0, 0, 1, 0, 0, 0}};
  features.labels = {1, 0};
  features.patient_ids = {"P00", "P01"};
  features.index_dates = {400, 400};
  const std::vector<double> w = {0.3, 0.8, 0.5, -0.6, 0.1, 0.7, -0.1};
  double dot = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) dot += w[j] * features.rows[0][j];
  const risk::RiskModel model(
      risk::ModelKind::kLR,
      {{7, 1, w, {std::log(0.83 / 0.17) - dot}, risk::Activation::kSigmoid}},
      features.feature_names, {});
  const cohort::CcsMap ccs = cohort::CcsMap::Load((kData / "ccs_map.json").string());
  const guideline::GuidelineDoc doc = ParseFixture().doc;
  const qa::LexicalAnswerer answerer(guideline::ToPassages(doc));
  const context::Templates templates =
      context::Templates::FromJson(ReadJsonFile(kData / "templates.json"));
  context::Stores stores;
  stores.features = &features;
  stores.ccs_map = &ccs;
  stores.model = &model;
  stores.model_id = "LR";
  stores.guidelines = &doc;
  stores.answerer = &answerer;
  stores.templates = &templates;
  const context::AnswerBundle bundle =
      context::Answer(context::QuestionKind::kDrugViability, "P00", stores);
  const std::string text = context::Render(bundle, context::RenderFormat::kText);
  const bool rendered = text.find("risk is found to be 0.83") != std::string::npos;
  out.Expect(rendered, "Q4 renders 0.83");
  out.detail << cells << "/21 annotation cells, Q4 text "
             << (rendered ? "contains" : "lacks") << " \"0.83\"";
}

// ---- prototype summary

void PrototypeSummaryCheck(Outcome& out) {
  const cohort::CcsMap map = cohort::CcsMap::Load((kData / "ccs_map.json").string());
  const std::vector<std::string> names = {"CCS_049",   "AGE_GRP_Y",
                                          "AGE_GRP_M", "AGE_GRP_O"};
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 20; ++i) {
    // Every patient has CCS 49; 15 old, 5 middle-aged.
    rows.push_back({1, 0, i < 15 ? 0.0 : 1.0, i < 15 ? 1.0 : 0.0});
  }
  const explain::PrototypeSummary s =
      explain::SummarizePrototypes(rows, names, {49}, map);
  std::string old_cell, full_cell;
  for (const auto& row : s.rows) {
    if (row.label == "AGE_GRP_O") old_cell = s.FormatCount(row);
    if (row.count == 20) full_cell = s.FormatCount(row);
  }
  out.Expect(old_cell == "15 (75.0)", "AGE_GRP_O cell");
  out.Expect(full_cell == "20 (100.0)", "20/20 cell");
  out.detail << "AGE_GRP_O \"" << old_cell << "\", 20/20 group \""
             << full_cell << "\"";
}

// ---- end to end

int RunCli(const std::string& args) {
  const std::string command =
      std::string(CKDCTX_CLI) + " " + args + " > /dev/null 2>&1";
  const int raw = std::system(command.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

pipeline::Artifacts ReadAll(const fs::path& dir) {
  const pipeline::Snapshot snapshot = pipeline::Workspace(dir).Current();
  pipeline::Artifacts all;
  for (const auto& [name, hash] : snapshot.manifest().artifacts) {
    all[name] = snapshot.Read(name);
  }
  return all;
}

void EndToEnd(Outcome& out) {
  const fs::path root = fs::temp_directory_path() / "ckdctx_accept_e2e";
  fs::remove_all(root);
  const std::string config = (kData / "config.json").string();
  const std::vector<std::string> steps = {
      "generate-data", "build-cohort", "train --kind LR", "train --kind MLP",
      "explain",       "prototypes",   "ingest-guidelines"};
  for (const char* run : {"cli_a", "cli_b"}) {
    for (const auto& step : steps) {
      const int status = RunCli(step + " --config " + config + " --data-dir " +
                                (root / run).string());
      if (!out.Expect(status == 0, std::string(run) + " " + step)) return;
    }
  }
  pipeline::PipelineConfig service_config =
      pipeline::PipelineConfig::Load(kData / "config.json");
  service_config.data_dir = (root / "service").string();
  {
    service::Service svc(service_config);
    auto job = [&](const std::string& path, const Json& body) {
      const service::Response r = svc.Handle({"POST", path, {}, body.dump(), ""});
      out.Expect(r.status == 202, path + " accepted");
    };
    job("/v1/cohort/build", Json::object());
    job("/v1/models/train", {{"kind", "LR"}});
    job("/v1/models/train", {{"kind", "MLP"}});
    svc.WaitIdle();
    job("/v1/explanations/build", Json::object());
    job("/v1/guidelines/ingest", Json::object());
    svc.WaitIdle();
  }
  const pipeline::Artifacts a = ReadAll(root / "cli_a");
  const pipeline::Artifacts b = ReadAll(root / "cli_b");
  const pipeline::Artifacts s = ReadAll(root / "service");
  out.Expect(a.size() == 12, "12 artifacts");
  out.Expect(a == b, "CLI runs byte-identical");
  out.Expect(a == s, "service artifacts byte-identical to CLI");
  std::size_t bytes = 0;
  for (const auto& [name, content] : a) bytes += content.size();
  out.detail << a.size() << " artifacts (" << bytes
             << " bytes) identical across 2 CLI runs and the service";
  fs::remove_all(root);
}

int RunAll() {
  const std::vector<Criterion> criteria = {
      {"cohort_rules", 1, CohortRules},
      {"metric_oracle", 1, MetricOracle},
      {"model_sanity", 120, ModelSanity},
      {"gradient_check", 10, GradientCheck},
      {"shapley", 60, ShapleyAxioms},
      {"protodash", 30, ProtoDashCheck},
      {"guideline_parser", 1, GuidelineParser},
      {"numeric_qa", 1, NumericQa},
      {"routing_table", 1, Routing},
      {"prototype_summary", 1, PrototypeSummaryCheck},
      {"end_to_end_determinism", 180, EndToEnd},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    Outcome out;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(out);
    } catch (const Error& e) {
      out.Expect(false, std::string(ErrorCodeName(e.code())) + ": " + e.what());
    } catch (const std::exception& e) {
      out.Expect(false, e.what());
    }
    const double seconds = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - start)
                               .count();
    out.Expect(seconds < c.budget_seconds, "runtime budget");
    if (!out.pass) ++failures;
    std::cout << (out.pass ? "PASS " : "FAIL ") << c.name << " ("
              << FormatFixed(seconds, 2) << " s / " << c.budget_seconds
              << " s): " << out.detail.str() << std::endl;
  }
  std::cout << criteria.size() - failures << "/" << criteria.size()
            << " criteria passed" << std::endl;
  return failures;
}

}  // namespace
}  // namespace ckdctx

int main() { return ckdctx::RunAll(); }
