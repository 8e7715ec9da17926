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

#ifndef CKDCTX_RISK_TRAIN_H_
#define CKDCTX_RISK_TRAIN_H_

#include <cstdint>
#include <span>
#include <vector>

#include "ckdctx/risk/model.h"
#include "ckdctx/risk/split.h"

namespace ckdctx::risk {

using Rows = std::vector<std::vector<double>>;

struct TrainConfig {
  ModelKind kind = ModelKind::kMLP;
  std::vector<int> hidden_sizes{64};
  double learning_rate = 1e-3;
  int batch_size = 64;
  int epochs = 50;
  std::uint64_t seed = 7;
  // Multiplier on the loss of positive rows; 1 means no reweighting.
  double pos_weight = 1.0;
  // Candidate learning rates for model selection; empty means just
  // learning_rate. Each candidate is trained from the same seed.
  std::vector<double> grid_learning_rates{1e-3, 1e-2};
  std::vector<std::vector<int>> grid_hidden_sizes;

  void Validate() const;
};

Json ToJson(const TrainConfig& config);
TrainConfig TrainConfigFromJson(const Json& json);

// Mean weighted binary cross-entropy over `batch`, evaluated in the
// log-sum-exp form, and its gradient with respect to every parameter.
struct LossAndGradient {
  double loss = 0.0;
  std::vector<DenseLayer> gradient;  // same shapes as the parameters
};

LossAndGradient ComputeLossAndGradient(const std::vector<DenseLayer>& layers,
                                       const Rows& rows,
                                       std::span<const int> labels,
                                       std::span<const std::size_t> batch,
                                       double pos_weight = 1.0);

double ComputeLoss(const std::vector<DenseLayer>& layers, const Rows& rows,
                   std::span<const int> labels,
                   std::span<const std::size_t> batch,
                   double pos_weight = 1.0);

// Randomly initialised layer stack: hidden ReLU layers then one sigmoid
// unit. With no hidden layers the weights start at zero (logistic
// regression).
std::vector<DenseLayer> InitLayers(int input_width,
                                   const std::vector<int>& hidden_sizes,
                                   std::uint64_t seed);

// Fits one model per candidate on split.train with mini-batch Adam and
// keeps the one with the best validation AUC-ROC (AUC-PRC breaks ties).
RiskModel Train(const Rows& rows, std::span<const int> labels,
                const std::vector<std::string>& feature_names,
                const Split& split, const TrainConfig& config);

}  // namespace ckdctx::risk

#endif  // CKDCTX_RISK_TRAIN_H_
