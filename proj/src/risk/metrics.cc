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

#include "ckdctx/risk/metrics.h"

#include <algorithm>
#include <numeric>

#include "ckdctx/common/error.h"

namespace ckdctx::risk {
namespace {

void CheckInputs(std::span<const double> scores, std::span<const int> labels) {
  if (scores.empty()) {
    throw Error(ErrorCode::kInput, "no rows to evaluate");
  }
  if (scores.size() != labels.size()) {
    throw Error(ErrorCode::kShape, "scores and labels differ in length");
  }
}

std::pair<int, int> CountClasses(std::span<const int> labels) {
  int positives = 0;
  for (int y : labels) positives += y == 1 ? 1 : 0;
  return {positives, static_cast<int>(labels.size()) - positives};
}

void RequireBothClasses(std::span<const int> labels) {
  auto [pos, neg] = CountClasses(labels);
  if (pos == 0 || neg == 0) {
    throw Error(ErrorCode::kAucUndefined,
                "AUC is undefined when the labels contain a single class");
  }
}

}  // namespace

double AucRoc(std::span<const double> scores, std::span<const int> labels) {
  CheckInputs(scores, labels);
  RequireBothClasses(labels);
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });
  // Mid-ranks for tied scores.
  double positive_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) {
      if (labels[order[k]] == 1) positive_rank_sum += rank;
    }
    i = j + 1;
  }
  auto [pos, neg] = CountClasses(labels);
  const double p = pos, q = neg;
  return (positive_rank_sum - p * (p + 1.0) / 2.0) / (p * q);
}

double AveragePrecision(std::span<const double> scores,
                        std::span<const int> labels) {
  CheckInputs(scores, labels);
  RequireBothClasses(labels);
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  const double total_pos = CountClasses(labels).first;
  double tp = 0.0, fp = 0.0, previous_recall = 0.0, ap = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] == 1 ? tp : fp) += 1.0;
      ++j;
    }
    const double recall = tp / total_pos;
    ap += (recall - previous_recall) * (tp / (tp + fp));
    previous_recall = recall;
    i = j;
  }
  return ap;
}

double BrierScore(std::span<const double> scores, std::span<const int> labels) {
  CheckInputs(scores, labels);
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double diff = scores[i] - labels[i];
    total += diff * diff;
  }
  return total / static_cast<double>(scores.size());
}

MetricsReport Evaluate(std::span<const double> scores,
                       std::span<const int> labels, double threshold) {
  CheckInputs(scores, labels);
  MetricsReport report;
  report.threshold = threshold;
  report.n = static_cast<int>(scores.size());
  report.n_positive = CountClasses(labels).first;
  report.auc_roc = AucRoc(scores, labels);
  report.auc_prc = AveragePrecision(scores, labels);
  report.brier = BrierScore(scores, labels);
  int tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    if (predicted && labels[i] == 1) ++tp;
    if (predicted && labels[i] != 1) ++fp;
    if (!predicted && labels[i] == 1) ++fn;
  }
  if (tp + fp == 0) {
    report.precision = 1.0;
    report.precision_undefined = true;
  } else {
    report.precision = static_cast<double>(tp) / (tp + fp);
  }
  report.recall = static_cast<double>(tp) / (tp + fn);
  return report;
}

MetricsReport Evaluate(const RiskModel& model,
                       const std::vector<std::vector<double>>& rows,
                       std::span<const int> labels,
                       std::span<const std::size_t> indices, double threshold) {
  std::vector<double> scores;
  std::vector<int> subset_labels;
  scores.reserve(indices.size());
  for (std::size_t r : indices) {
    scores.push_back(model.PredictProba(rows[r]));
    subset_labels.push_back(labels[r]);
  }
  return Evaluate(scores, subset_labels, threshold);
}

Json ToJson(const MetricsReport& r) {
  return {{"precision", r.precision},
          {"recall", r.recall},
          {"auc_roc", r.auc_roc},
          {"auc_prc", r.auc_prc},
          {"brier", r.brier},
          {"threshold", r.threshold},
          {"precision_undefined", r.precision_undefined},
          {"n", r.n},
          {"n_positive", r.n_positive}};
}

MetricsReport MetricsFromJson(const Json& json) {
  const std::string path;
  MetricsReport r;
  r.precision = RequireNumber(json, "precision", path);
  r.recall = RequireNumber(json, "recall", path);
  r.auc_roc = RequireNumber(json, "auc_roc", path);
  r.auc_prc = RequireNumber(json, "auc_prc", path);
  r.brier = RequireNumber(json, "brier", path);
  r.threshold = RequireNumber(json, "threshold", path);
  r.precision_undefined =
      RequireField(json, "precision_undefined", path).get<bool>();
  r.n = static_cast<int>(RequireInt(json, "n", path));
  r.n_positive = static_cast<int>(RequireInt(json, "n_positive", path));
  return r;
}

}  // namespace ckdctx::risk
