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

#include <cmath>
#include <memory>

#include "ckdctx/common/error.h"
#include "ckdctx/common/rng.h"
#include "ckdctx/context/answer.h"
#include "ckdctx/context/bundle.h"
#include "ckdctx/context/routing.h"
#include "ckdctx/context/templates.h"
#include "ckdctx/guideline/parser.h"
#include "gtest/gtest.h"

namespace ckdctx::context {
namespace {

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

const std::string kData = CKDCTX_DATA_DIR;
using D = Dimension;

// 24 patients over five CCS indicators plus demographics, an LR model whose
// bias puts P00 at a risk of 0.83, and every store loaded.
class Fixture {
 public:
  Fixture() {
    features_.ccs_codes = {49, 50, 53, 98, 163};
    features_.feature_names = {"CCS_049",   "CCS_050",   "CCS_053",
                               "CCS_098",   "CCS_163",   "AGE_GRP_Y",
                               "AGE_GRP_M", "AGE_GRP_O", "SEX_FEMALE"};
    Rng rng(11);
    for (int i = 0; i < 24; ++i) {
      std::vector<double> row(9, 0.0);
      for (int j = 0; j < 5; ++j) row[j] = rng.Bernoulli(0.4) ? 1.0 : 0.0;
      row[5 + rng.Below(3)] = 1.0;
      row[8] = rng.Bernoulli(0.5) ? 1.0 : 0.0;
      features_.rows.push_back(row);
      features_.labels.push_back(i % 2);
      features_.patient_ids.push_back((i < 10 ? "P0" : "P") +
                                      std::to_string(i));
      features_.index_dates.push_back(400);
    }
    // P00: HbA1c proxy (CCS 50), hypertension, genitourinary.
    features_.rows[0] = {0, 1, 0, 1, 1, 0, 0, 1, 1};
    ccs_ = cohort::CcsMap::Load(kData + "/ccs_map.json");
    SetRisk(0.83);
    explanations_.reference = features_.rows[1];
    for (std::size_t i = 0; i < 20; ++i) {
      prototypes_.set.indices.push_back(i);
      prototypes_.set.weights.push_back(0.05);
      prototypes_.patient_ids.push_back(features_.patient_ids[i]);
    }
    std::vector<std::vector<double>> proto_rows(features_.rows.begin(),
                                                features_.rows.begin() + 20);
    prototypes_.summary = explain::SummarizePrototypes(
        proto_rows, features_.feature_names, features_.ccs_codes, ccs_);
    guideline::ParseConfig config = guideline::ParseConfig::FromJson(
        ReadJsonFile(kData + "/guidelines/parse_config.json"));
    doc_ = guideline::ParseHtml(
               ReadFile(kData + "/guidelines/ada_fixture.html"), config)
               .doc;
    answerer_ = std::make_unique<qa::LexicalAnswerer>(
        guideline::ToPassages(doc_));
    templates_ = Templates::FromJson(ReadJsonFile(kData + "/templates.json"));
  }

  // Weights fixed, bias chosen so P00 gets `risk`.
  void SetRisk(double risk) {
    const std::vector<double> w = {0.3, 0.8, -0.2, 0.5, 0.4,
                                   -0.6, 0.1, 0.7, -0.1};
    double dot = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) dot += w[j] * features_.rows[0][j];
    const double bias = std::log(risk / (1.0 - risk)) - dot;
    model_ = std::make_unique<risk::RiskModel>(
        risk::ModelKind::kLR,
        std::vector<risk::DenseLayer>{
            {9, 1, w, {bias}, risk::Activation::kSigmoid}},
        features_.feature_names, risk::TrainMeta{});
  }

  Stores stores() const {
    Stores s;
    s.features = &features_;
    s.ccs_map = &ccs_;
    s.model = model_.get();
    s.model_id = "model_LR";
    s.explanations = &explanations_;
    s.prototypes = &prototypes_;
    s.guidelines = &doc_;
    s.answerer = answerer_.get();
    s.templates = &templates_;
    return s;
  }

  cohort::FeatureMatrix features_;
  cohort::CcsMap ccs_;
  std::unique_ptr<risk::RiskModel> model_;
  ExplanationStore explanations_;
  PrototypeStore prototypes_;
  guideline::GuidelineDoc doc_;
  std::unique_ptr<qa::LexicalAnswerer> answerer_;
  Templates templates_;
};

std::string TemplatedText(const AnswerBundle& b) {
  for (const AnswerPart& p : b.parts()) {
    if (p.kind == PartKind::kTemplatedText) {
      return p.payload["text"].get<std::string>();
    }
  }
  return "";
}

const AnswerPart* FirstOf(const AnswerBundle& b, PartKind kind) {
  for (const AnswerPart& p : b.parts()) {
    if (p.kind == kind) return &p;
  }
  return nullptr;
}

TEST(RoutingTest, MatchesAnnotationTable) {
  using S = Source;
  using R = Relevance;
  const std::vector<std::pair<std::string, QuestionAnnotation>> table = {
      {"Q1", {S::kAlgorithmic, R::kBoth, {D::kPostHocExplanation}}},
      {"Q2", {S::kAlgorithmic, R::kCkd, {D::kRiskPrediction}}},
      {"Q3", {S::kAlgorithmic, R::kT2dm, {D::kRiskPrediction}}},
      {"Q3a", {S::kGuidelines, R::kT2dm, {D::kPatient}}},
      {"Q4", {S::kGuidelines, R::kBoth, {D::kPatient, D::kRiskPrediction}}},
      {"Q5", {S::kGuidelines, R::kBoth, {D::kPatient, D::kRiskPrediction}}},
      {"Q6", {S::kGuidelines, R::kT2dm, {D::kPatient}}},
  };
  ASSERT_EQ(NamedKinds().size(), table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    Route r = RouteQuestion(table[i].first);
    EXPECT_EQ(r.kind, NamedKinds()[i]);
    EXPECT_EQ(r.annotation, table[i].second) << table[i].first;
    EXPECT_EQ(RouteQuestion(KindName(r.kind)).kind, r.kind);
  }
  EXPECT_EQ(DimensionsText(Annotation(QuestionKind::kDrugViability).dimensions),
            "patient + risk prediction");
}

TEST(RoutingTest, FreeTextFallback) {
  Route r = RouteQuestion("how often should eGFR be checked?");
  EXPECT_EQ(r.kind, QuestionKind::kFreeText);
  EXPECT_EQ(r.annotation.source, Source::kGuidelines);
  EXPECT_FALSE(r.annotation.dimensions.empty());
  EXPECT_FALSE(ParseKind("Q9").has_value());
  EXPECT_EQ(RouteQuestion("Q9").kind, QuestionKind::kFreeText);
}

TEST(TemplatesTest, FillAndErrors) {
  EXPECT_EQ(FillTemplate("risk {risk}, {a}{a}", {{"risk", "0.83"}, {"a", "x"}}),
            "risk 0.83, xx");
  EXPECT_EQ(ErrorOf([] { FillTemplate("{missing}", {}); }).code(),
            ErrorCode::kRender);
  EXPECT_EQ(ErrorOf([] { FillTemplate("open {", {}); }).code(),
            ErrorCode::kRender);
  EXPECT_EQ(TemplateSlots("a {x} b {y}"),
            (std::vector<std::string>{"x", "y"}));
  Templates t = Templates::FromJson(ReadJsonFile(kData + "/templates.json"));
  EXPECT_EQ(Templates::FromJson(t.ToJson()), t);
  EXPECT_NE(t.AnswerText("Q4").find("risk is found to be {risk}"),
            std::string::npos);
  EXPECT_EQ(ErrorOf([&] { t.AnswerText("Q9"); }).code(), ErrorCode::kConfig);
  ContextOptions o;
  EXPECT_EQ(ContextOptions::FromJson(o.ToJson()), o);
  EXPECT_EQ(o.lab_rules[0].Label(), "High HbA1C (≥ 10)");
}

TEST(AnswerTest, DrugViabilityRendersTwoDecimalRisk) {
  Fixture f;
  AnswerBundle b = Answer(QuestionKind::kDrugViability, "P00", f.stores());
  EXPECT_NE(TemplatedText(b).find("risk is found to be 0.83"),
            std::string::npos)
      << TemplatedText(b);
  EXPECT_NE(TemplatedText(b).find("GLP-1 RA"), std::string::npos);
  EXPECT_NE(Render(b, RenderFormat::kText).find("risk is found to be 0.83"),
            std::string::npos);
  EXPECT_TRUE(DanglingProvenance(b, f.stores()).empty());
  EXPECT_NE(FirstOf(b, PartKind::kGuidelineText), nullptr);
}

TEST(AnswerTest, DrugViabilityTemplateStable) {
  Fixture f;
  const std::string a =
      TemplatedText(Answer(QuestionKind::kDrugViability, "P00", f.stores()));
  f.SetRisk(0.4);
  const std::string b =
      TemplatedText(Answer(QuestionKind::kDrugViability, "P00", f.stores()));
  ASSERT_NE(a, b);
  auto mask = [](std::string s, const std::string& v) {
    return s.replace(s.find(v), v.size(), "{risk}");
  };
  EXPECT_EQ(mask(a, "0.83"), mask(b, "0.40"));
}

TEST(AnswerTest, PrototypeOverviewHasTwenty) {
  Fixture f;
  AnswerBundle b = Answer(QuestionKind::kPrototypeOverview, "", f.stores());
  const AnswerPart* summary = FirstOf(b, PartKind::kPrototypeSummary);
  ASSERT_NE(summary, nullptr);
  EXPECT_EQ(summary->payload["n"], 20);
  EXPECT_EQ(summary->provenance.ids.size(), 20u);
  ASSERT_NE(FirstOf(b, PartKind::kFeatureImportance), nullptr);
  EXPECT_TRUE(DanglingProvenance(b, f.stores()).empty());
}

TEST(AnswerTest, RiskRationaleNullPlayers) {
  Fixture f;
  // P01 is the explanation reference, so every feature is a null player.
  AnswerBundle b = Answer(QuestionKind::kRiskRationale, "P01", f.stores());
  const AnswerPart* fi = FirstOf(b, PartKind::kFeatureImportance);
  ASSERT_NE(fi, nullptr);
  EXPECT_EQ(fi->payload["entries"].size(), 9u);
  for (const Json& e : fi->payload["entries"]) {
    EXPECT_EQ(e["phi"].get<double>(), 0.0);
  }
  AnswerBundle p0 = Answer(QuestionKind::kRiskRationale, "P00", f.stores());
  const AnswerPart* fi0 = FirstOf(p0, PartKind::kFeatureImportance);
  double sum = 0.0;
  for (const Json& e : fi0->payload["entries"]) sum += e["phi"].get<double>();
  EXPECT_NEAR(sum, 0.83 - f.model_->PredictProba(f.features_.rows[1]), 1e-9);
  EXPECT_EQ(FirstOf(p0, PartKind::kRiskScore)->payload["display"], "0.83");
}

TEST(AnswerTest, PatientDescriptionFlagsProxy) {
  Fixture f;
  AnswerBundle b = Answer(QuestionKind::kPatientDescription, "P00", f.stores());
  const AnswerPart* stat = FirstOf(b, PartKind::kCohortStat);
  ASSERT_NE(stat, nullptr);
  ASSERT_EQ(stat->payload["lab_flags"].size(), 1u);
  EXPECT_EQ(stat->payload["lab_flags"][0]["source"], "proxy");
  EXPECT_EQ(TemplatedText(b).rfind("High HbA1C (≥ 10). Other top conditions: ",
                                   0),
            0u)
      << TemplatedText(b);
  // Groups ordered by cohort frequency.
  double last = 1.0;
  for (const Json& c : stat->payload["conditions"]) {
    EXPECT_LE(c["cohort_frequency"].get<double>(), last);
    last = c["cohort_frequency"].get<double>();
  }
}

TEST(AnswerTest, GuidelineQuestionsRetrieveTableAnswers) {
  Fixture f;
  AnswerBundle q3a =
      Answer(QuestionKind::kLabThresholdGuideline, "P00", f.stores());
  EXPECT_EQ(q3a.question(),
            "What should be done if A1C levels are greater than 10?");
  const AnswerPart* g = FirstOf(q3a, PartKind::kGuidelineText);
  ASSERT_NE(g, nullptr);
  EXPECT_NE(g->payload["text"].get<std::string>().find(
                "early introduction of insulin should"),
            std::string::npos);
  EXPECT_GT(g->payload["numeric_bonus"].get<double>(), 0.0);

  AnswerBundle q6 = Answer(QuestionKind::kTreatmentGoals, "P00", f.stores());
  EXPECT_NE(FirstOf(q6, PartKind::kGuidelineText)
                ->payload["text"]
                .get<std::string>()
                .find("should not be delayed"),
            std::string::npos);

  AnswerBundle q5 =
      Answer(QuestionKind::kComplicationTreatment, "P00", f.stores());
  EXPECT_EQ(q5.parts()[0].kind, PartKind::kRiskScore);
  EXPECT_NE(FirstOf(q5, PartKind::kGuidelineText)
                ->payload["text"]
                .get<std::string>()
                .find("co-transporter 2 inhibitor"),
            std::string::npos);
  for (const auto* b : {&q3a, &q5, &q6}) {
    EXPECT_TRUE(DanglingProvenance(*b, f.stores()).empty());
  }
}

TEST(AnswerTest, LabOverrideInterpolated) {
  Fixture f;
  LabValues labs = LabValuesFromJson(Json::parse(R"({"P00": {"a1c": 11.2}})"));
  Stores s = f.stores();
  s.labs = &labs;
  AnswerBundle b = Answer(QuestionKind::kLabThresholdGuideline, "P00", s);
  EXPECT_EQ(b.question(),
            "What should be done if A1C levels are greater than 11.2?");
  EXPECT_GT(FirstOf(b, PartKind::kGuidelineText)
                ->payload["numeric_bonus"]
                .get<double>(),
            0.0);
  AnswerBundle d = Answer(QuestionKind::kPatientDescription, "P00", s);
  EXPECT_EQ(FirstOf(d, PartKind::kCohortStat)->payload["lab_flags"][0]["source"],
            "lab");
}

TEST(AnswerTest, Errors) {
  Fixture f;
  Stores s = f.stores();
  Error e = ErrorOf([&] { Answer(QuestionKind::kRiskRationale, "nobody", s); });
  EXPECT_EQ(e.code(), ErrorCode::kNotFound);
  e = ErrorOf([&] { Answer(QuestionKind::kRiskRationale, "", s); });
  EXPECT_EQ(e.code(), ErrorCode::kInput);
  EXPECT_EQ(e.path(), "patient_id");
  s.model = nullptr;
  e = ErrorOf([&] { Answer(QuestionKind::kDrugViability, "P00", s); });
  EXPECT_EQ(e.code(), ErrorCode::kDependency);
  EXPECT_EQ(e.path(), "model");
  s = f.stores();
  s.answerer = nullptr;
  e = ErrorOf([&] { Answer(QuestionKind::kTreatmentGoals, "P00", s); });
  EXPECT_EQ(e.path(), "guidelines");
  s = f.stores();
  s.prototypes = nullptr;
  e = ErrorOf([&] { Answer(QuestionKind::kPrototypeOverview, "", s); });
  EXPECT_EQ(e.path(), "prototypes");
}

TEST(AnswerTest, FreeText) {
  Fixture f;
  AnswerBundle b = Answer(QuestionKind::kFreeText, "", f.stores(),
                          "How often should the estimated glomerular filtration rate be assessed?");
  EXPECT_EQ(b.parts()[0].provenance.ids[0], "11.1.1");
  EXPECT_EQ(ErrorOf([&] {
              Answer(QuestionKind::kFreeText, "", f.stores(), "zebra quartz");
            }).code(),
            ErrorCode::kQuery);
}

TEST(BundleTest, JsonRoundTripAndText) {
  Fixture f;
  for (QuestionKind kind : NamedKinds()) {
    const std::string patient =
        kind == QuestionKind::kPrototypeOverview ? "" : "P00";
    AnswerBundle b = Answer(kind, patient, f.stores());
    const std::string json = Render(b, RenderFormat::kJson);
    EXPECT_EQ(AnswerBundleFromJson(ParseJson(json, "bundle")), b);
    EXPECT_TRUE(DanglingProvenance(b, f.stores()).empty()) << KindLabel(kind);
  }
  AnswerBundle q6 = Answer(QuestionKind::kTreatmentGoals, "P00", f.stores());
  const std::string rec_id =
      FirstOf(q6, PartKind::kGuidelineText)->provenance.ids[0];
  const std::string text = Render(q6, RenderFormat::kText);
  EXPECT_NE(text.find("[1] guideline_ingest guidelines: " + rec_id),
            std::string::npos)
      << text;
}

TEST(BundleTest, InvariantsAtConstruction) {
  EXPECT_EQ(ErrorOf([] {
              AnswerBundle("q", QuestionKind::kFreeText,
                           Annotation(QuestionKind::kFreeText), "", {});
            }).code(),
            ErrorCode::kRender);
  AnswerPart orphan{PartKind::kRiskScore, Json::object(), {}};
  EXPECT_EQ(ErrorOf([&] {
              AnswerBundle("q", QuestionKind::kFreeText,
                           Annotation(QuestionKind::kFreeText), "", {orphan});
            }).code(),
            ErrorCode::kRender);
  AnswerPart templated{PartKind::kTemplatedText,
                       {{"text", "x"}, {"slot_parts", {{"risk", 3}}}},
                       {"contextualizer", "templates", {"answers.Q4"}}};
  EXPECT_EQ(ErrorOf([&] {
              AnswerBundle("q", QuestionKind::kFreeText,
                           Annotation(QuestionKind::kFreeText), "",
                           {templated});
            }).code(),
            ErrorCode::kRender);
}

}  // namespace
}  // namespace ckdctx::context
