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

#ifndef CKDCTX_RISK_METRICS_H_
#define CKDCTX_RISK_METRICS_H_

#include <span>
#include <vector>

#include "ckdctx/common/json_util.h"
#include "ckdctx/risk/model.h"

namespace ckdctx::risk {

struct MetricsReport {
  double precision = 0.0;
  double recall = 0.0;
  double auc_roc = 0.0;
  double auc_prc = 0.0;
  double brier = 0.0;
  double threshold = 0.5;
  // Set when nothing is predicted positive; precision is then reported as 1.
  bool precision_undefined = false;
  int n = 0;
  int n_positive = 0;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

// Mann-Whitney statistic with ties counted as 1/2.
double AucRoc(std::span<const double> scores, std::span<const int> labels);
// Average precision: sum over score thresholds of precision times the
// recall increment.
double AveragePrecision(std::span<const double> scores,
                        std::span<const int> labels);
double BrierScore(std::span<const double> scores, std::span<const int> labels);

MetricsReport Evaluate(std::span<const double> scores,
                       std::span<const int> labels, double threshold = 0.5);
MetricsReport Evaluate(const RiskModel& model,
                       const std::vector<std::vector<double>>& rows,
                       std::span<const int> labels,
                       std::span<const std::size_t> indices,
                       double threshold = 0.5);

Json ToJson(const MetricsReport& report);
MetricsReport MetricsFromJson(const Json& json);

}  // namespace ckdctx::risk

#endif  // CKDCTX_RISK_METRICS_H_
