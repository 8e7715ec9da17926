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
#include <numeric>

#include "ckdctx/common/error.h"
#include "ckdctx/common/rng.h"
#include "ckdctx/risk/metrics.h"
#include "ckdctx/risk/model.h"
#include "ckdctx/risk/split.h"
#include "ckdctx/risk/train.h"
#include "gtest/gtest.h"

namespace ckdctx::risk {
namespace {

template <typename Fn>
ErrorCode CodeOf(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kIo;
}

RiskModel MakeLr(std::vector<double> w, double b) {
  DenseLayer layer;
  layer.in = static_cast<int>(w.size());
  layer.out = 1;
  layer.weights = std::move(w);
  layer.bias = {b};
  layer.activation = Activation::kSigmoid;
  std::vector<std::string> names;
  for (int j = 0; j < layer.in; ++j) names.push_back("f" + std::to_string(j));
  return RiskModel(ModelKind::kLR, {layer}, names, {});
}

// Two Gaussian blobs separated along both axes.
void SeparableToy(int n, Rows* rows, std::vector<int>* labels) {
  Rng rng(5);
  for (int i = 0; i < n; ++i) {
    const int y = i % 2;
    const double c = y ? 2.0 : -2.0;
    rows->push_back({c + 0.5 * rng.Normal(), c + 0.5 * rng.Normal()});
    labels->push_back(y);
  }
}

TEST(SplitTest, SizesFollowRoundedFractions) {
  const Split s = SplitData(10, {0.7, 0.1, 0.2}, 1);
  EXPECT_EQ(s.train.size(), 7u);
  EXPECT_EQ(s.validation.size(), 1u);
  EXPECT_EQ(s.test.size(), 2u);
  std::vector<std::size_t> all = s.train;
  all.insert(all.end(), s.validation.begin(), s.validation.end());
  all.insert(all.end(), s.test.begin(), s.test.end());
  std::sort(all.begin(), all.end());
  std::vector<std::size_t> expected(10);
  std::iota(expected.begin(), expected.end(), 0);
  EXPECT_EQ(all, expected);
}

TEST(SplitTest, DeterministicAndValidated) {
  const Split a = SplitData(100, {}, 3);
  const Split b = SplitData(100, {}, 3);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test, b.test);
  EXPECT_NE(a.train, SplitData(100, {}, 4).train);
  EXPECT_EQ(CodeOf([] { SplitData(2, {}, 1); }), ErrorCode::kSplit);
  EXPECT_EQ(CodeOf([] { SplitData(100, {0.5, 0.1, 0.1}, 1); }),
            ErrorCode::kSplit);
}

TEST(ModelTest, PredictExamples) {
  EXPECT_DOUBLE_EQ(MakeLr({0, 0}, 0).PredictProba(std::vector<double>{3, -7}),
                   0.5);
  const double p =
      MakeLr({1, 0}, 0).PredictProba(std::vector<double>{std::log(3.0), 5});
  EXPECT_NEAR(p, 0.75, 1e-15);
  EXPECT_EQ(CodeOf([] {
              MakeLr({1, 0}, 0).PredictProba(std::vector<double>{1});
            }),
            ErrorCode::kShape);
}

TEST(ModelTest, ProbabilityStaysInsideOpenInterval) {
  const RiskModel m = MakeLr({1000}, 0);
  const double hi = m.PredictProba(std::vector<double>{10});
  const double lo = m.PredictProba(std::vector<double>{-10});
  EXPECT_GT(lo, 0.0);
  EXPECT_LT(hi, 1.0);
}

TEST(ModelTest, JsonRoundTripAndVersion) {
  Rows rows;
  std::vector<int> labels;
  SeparableToy(100, &rows, &labels);
  TrainConfig config;
  config.kind = ModelKind::kMLP;
  config.hidden_sizes = {4};
  config.epochs = 3;
  const RiskModel m =
      Train(rows, labels, {"a", "b"}, SplitData(rows.size(), {}, 1), config);
  const Json json = m.ToJson();
  EXPECT_EQ(RiskModel::FromJson(json), m);
  EXPECT_EQ(RiskModel::FromJson(ParseJson(DumpCanonical(json), "model")), m);
  Json bad = json;
  bad["format_version"] = 2;
  EXPECT_EQ(CodeOf([&] { RiskModel::FromJson(bad); }),
            ErrorCode::kUnsupportedVersion);
}

TEST(ModelTest, KindParsing) {
  EXPECT_EQ(ParseModelKind("LR"), ModelKind::kLR);
  EXPECT_EQ(ParseModelKind("mlp"), ModelKind::kMLP);
  try {
    ParseModelKind("SVM");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
    EXPECT_EQ(e.path(), "kind");
  }
}

TEST(TrainTest, LrFitsSeparableData) {
  Rows rows;
  std::vector<int> labels;
  SeparableToy(200, &rows, &labels);
  const Split split = SplitData(rows.size(), {}, 1);
  TrainConfig config;
  config.kind = ModelKind::kLR;
  const RiskModel m = Train(rows, labels, {"a", "b"}, split, config);
  int correct = 0;
  for (std::size_t i : split.test) {
    correct += (m.PredictProba(rows[i]) >= 0.5) == (labels[i] == 1);
  }
  EXPECT_GE(static_cast<double>(correct) / split.test.size(), 0.95);
  EXPECT_LT(m.meta().final_loss, m.meta().initial_loss);
}

TEST(TrainTest, DeterministicForSeed) {
  Rows rows;
  std::vector<int> labels;
  SeparableToy(120, &rows, &labels);
  const Split split = SplitData(rows.size(), {}, 2);
  TrainConfig config;
  config.kind = ModelKind::kMLP;
  config.hidden_sizes = {8};
  config.epochs = 5;
  EXPECT_EQ(Train(rows, labels, {"a", "b"}, split, config),
            Train(rows, labels, {"a", "b"}, split, config));
}

TEST(TrainTest, Errors) {
  Rows rows(20, std::vector<double>{1.0});
  std::vector<int> zeros(20, 0);
  const Split split = SplitData(rows.size(), {}, 1);
  EXPECT_EQ(CodeOf([&] { Train(rows, zeros, {"a"}, split, TrainConfig{}); }),
            ErrorCode::kDegenerateLabel);

  Rows huge;
  std::vector<int> labels;
  for (int i = 0; i < 40; ++i) {
    huge.push_back({i % 2 ? 1e300 : -1e300});
    labels.push_back(i % 3 == 0);
  }
  TrainConfig config;
  config.learning_rate = 1e10;
  config.grid_learning_rates = {1e10};
  try {
    Train(huge, labels, {"a"}, SplitData(huge.size(), {}, 1), config);
    FAIL() << "expected divergence";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDivergence);
    EXPECT_NE(std::string(e.what()).find("epoch"), std::string::npos);
  }
}

TEST(TrainTest, ConfigJson) {
  TrainConfig config;
  config.kind = ModelKind::kMLP;
  EXPECT_EQ(ToJson(TrainConfigFromJson(ToJson(config))), ToJson(config));
  EXPECT_EQ(CodeOf([] { TrainConfigFromJson({{"kind", "SVM"}}); }),
            ErrorCode::kConfig);
  EXPECT_EQ(CodeOf([] { TrainConfigFromJson({{"epochs", 0}}); }),
            ErrorCode::kConfig);
}

// Central differences against the analytic gradient for every parameter.
double MaxRelativeGradientError(const std::vector<int>& hidden,
                                std::uint64_t seed) {
  Rng rng(seed);
  const int width = 5;
  Rows rows;
  std::vector<int> labels;
  for (int i = 0; i < 12; ++i) {
    std::vector<double> x(width);
    for (double& v : x) v = rng.Normal();
    rows.push_back(x);
    labels.push_back(rng.Bernoulli(0.4) ? 1 : 0);
  }
  std::vector<DenseLayer> layers = InitLayers(width, hidden, seed);
  for (DenseLayer& layer : layers) {
    for (double& w : layer.weights) w += 0.3 * rng.Normal();
    for (double& b : layer.bias) b = 0.1 * rng.Normal();
  }
  std::vector<std::size_t> batch(rows.size());
  std::iota(batch.begin(), batch.end(), 0);
  const double pos_weight = 1.7;
  const LossAndGradient analytic =
      ComputeLossAndGradient(layers, rows, labels, batch, pos_weight);
  const double h = 1e-6;
  double worst = 0.0;
  auto check = [&](double* param, double grad) {
    const double saved = *param;
    *param = saved + h;
    const double up = ComputeLoss(layers, rows, labels, batch, pos_weight);
    *param = saved - h;
    const double down = ComputeLoss(layers, rows, labels, batch, pos_weight);
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

TEST(GradientTest, MatchesFiniteDifferences) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    EXPECT_LT(MaxRelativeGradientError({}, seed), 1e-4) << "LR seed " << seed;
    EXPECT_LT(MaxRelativeGradientError({6}, seed), 1e-4)
        << "MLP seed " << seed;
  }
}

TEST(MetricsTest, HandExamples) {
  const std::vector<double> s1 = {0.9, 0.8, 0.3, 0.2};
  const std::vector<int> y1 = {1, 1, 0, 0};
  EXPECT_DOUBLE_EQ(AucRoc(s1, y1), 1.0);
  EXPECT_NEAR(BrierScore(s1, y1), 0.045, 1e-12);

  const std::vector<double> s2 = {0.9, 0.7, 0.7, 0.3, 0.1};
  const std::vector<int> y2 = {1, 0, 1, 0, 0};
  EXPECT_NEAR(AucRoc(s2, y2), 5.5 / 6.0, 1e-9);
  // Thresholds 0.9 (P=1, R=1/2) and 0.7 (P=2/3, R=1).
  EXPECT_NEAR(AveragePrecision(s2, y2), 0.5 + (2.0 / 3.0) * 0.5, 1e-12);

  const std::vector<double> exact = {1, 0, 1};
  EXPECT_DOUBLE_EQ(BrierScore(exact, std::vector<int>{1, 0, 1}), 0.0);
}

TEST(MetricsTest, ConstantMeanBrierIsLabelVariance) {
  const std::vector<int> y = {1, 0, 0, 1, 0, 0, 0, 1, 0, 0};
  const double mean = 0.3;
  const std::vector<double> s(y.size(), mean);
  EXPECT_NEAR(BrierScore(s, y), mean * (1 - mean), 1e-9);
}

TEST(MetricsTest, SingleClassAndUndefinedPrecision) {
  const std::vector<double> s = {0.1, 0.2};
  EXPECT_EQ(CodeOf([&] { AucRoc(s, std::vector<int>{1, 1}); }),
            ErrorCode::kAucUndefined);
  const MetricsReport r = Evaluate(s, std::vector<int>{1, 0});
  EXPECT_TRUE(r.precision_undefined);
  EXPECT_EQ(r.precision, 1.0);
  EXPECT_EQ(r.recall, 0.0);
  EXPECT_EQ(MetricsFromJson(ToJson(r)), r);
}

TEST(MetricsTest, AucIsRankBased) {
  Rng rng(3);
  std::vector<double> s;
  std::vector<int> y;
  for (int i = 0; i < 200; ++i) {
    s.push_back(rng.Uniform());
    y.push_back(rng.Bernoulli(0.3));
  }
  std::vector<double> squashed;
  for (double v : s) squashed.push_back(v * v * v);
  EXPECT_NEAR(AucRoc(s, y), AucRoc(squashed, y), 1e-12);
  // Pairwise oracle.
  double wins = 0, pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[i] != 1 || y[j] != 0) continue;
      pairs += 1;
      wins += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
    }
  }
  EXPECT_NEAR(AucRoc(s, y), wins / pairs, 1e-12);
}

}  // namespace
}  // namespace ckdctx::risk
