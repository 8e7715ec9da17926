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

#ifndef CKDCTX_RISK_MODEL_H_
#define CKDCTX_RISK_MODEL_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ckdctx/common/json_util.h"

namespace ckdctx::risk {

enum class ModelKind { kLR, kMLP };
enum class Activation { kIdentity, kRelu, kSigmoid };

std::string_view ModelKindName(ModelKind kind);
// Accepts "LR" and "MLP" (case-insensitive); throws kConfig otherwise.
ModelKind ParseModelKind(std::string_view text);

// Fully connected layer computing activation(W x + b). W is out x in,
// row-major.
struct DenseLayer {
  int in = 0;
  int out = 0;
  std::vector<double> weights;
  std::vector<double> bias;
  Activation activation = Activation::kIdentity;

  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

struct CandidateResult {
  double learning_rate = 0.0;
  std::vector<int> hidden_sizes;
  double validation_auc_roc = 0.0;
  double validation_auc_prc = 0.0;

  friend bool operator==(const CandidateResult&,
                         const CandidateResult&) = default;
};

struct TrainMeta {
  std::uint64_t seed = 0;
  int epochs = 0;
  int batch_size = 0;
  double learning_rate = 0.0;
  double pos_weight = 1.0;
  std::vector<int> hidden_sizes;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  std::vector<double> loss_history;  // training loss after each epoch
  std::vector<CandidateResult> candidates;

  friend bool operator==(const TrainMeta&, const TrainMeta&) = default;
};

// Probabilities are kept inside [kMinProbability, 1 - kMinProbability].
inline constexpr double kMinProbability = 1e-12;

// A trained LR or MLP. The layer stack ends in a single sigmoid unit; an LR
// model is the one-layer case. Instances are immutable.
class RiskModel {
 public:
  RiskModel(ModelKind kind, std::vector<DenseLayer> layers,
            std::vector<std::string> feature_names, TrainMeta meta);

  ModelKind kind() const { return kind_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  const std::vector<std::string>& feature_names() const {
    return feature_names_;
  }
  const TrainMeta& meta() const { return meta_; }
  std::size_t input_width() const {
    return static_cast<std::size_t>(layers_.front().in);
  }

  // Pre-sigmoid output. Throws kShape on width mismatch.
  double Logit(std::span<const double> x) const;
  double PredictProba(std::span<const double> x) const;

  Json ToJson() const;
  static RiskModel FromJson(const Json& json);

  friend bool operator==(const RiskModel&, const RiskModel&) = default;

 private:
  ModelKind kind_;
  std::vector<DenseLayer> layers_;
  std::vector<std::string> feature_names_;
  TrainMeta meta_;
};

// Forward pass of a raw layer stack up to the final pre-activation.
double ForwardLogit(const std::vector<DenseLayer>& layers,
                    std::span<const double> x);
double Sigmoid(double z);

}  // namespace ckdctx::risk

#endif  // CKDCTX_RISK_MODEL_H_
