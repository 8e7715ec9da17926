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

#include "ckdctx/risk/train.h"

#include <algorithm>
#include <cmath>

#include "ckdctx/common/error.h"
#include "ckdctx/common/rng.h"
#include "ckdctx/risk/metrics.h"

namespace ckdctx::risk {
namespace {

// log(1 + exp(z)) without overflow.
double Softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

std::vector<DenseLayer> ZerosLike(const std::vector<DenseLayer>& layers) {
  std::vector<DenseLayer> out = layers;
  for (DenseLayer& layer : out) {
    std::fill(layer.weights.begin(), layer.weights.end(), 0.0);
    std::fill(layer.bias.begin(), layer.bias.end(), 0.0);
  }
  return out;
}

// Scratch buffers reused across rows.
struct Workspace {
  std::vector<std::vector<double>> pre;   // pre-activations per layer
  std::vector<std::vector<double>> post;  // post-activations per layer
  std::vector<double> delta;
  std::vector<double> delta_prev;
};

double Forward(const std::vector<DenseLayer>& layers,
               const std::vector<double>& x, Workspace& ws) {
  ws.pre.resize(layers.size());
  ws.post.resize(layers.size());
  const std::vector<double>* input = &x;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const DenseLayer& layer = layers[l];
    auto& pre = ws.pre[l];
    pre.assign(layer.bias.begin(), layer.bias.end());
    for (int o = 0; o < layer.out; ++o) {
      const double* w =
          layer.weights.data() + static_cast<std::size_t>(o) * layer.in;
      double acc = pre[o];
      for (int i = 0; i < layer.in; ++i) acc += w[i] * (*input)[i];
      pre[o] = acc;
    }
    auto& post = ws.post[l];
    post = pre;
    if (l + 1 < layers.size() && layer.activation == Activation::kRelu) {
      for (double& v : post) v = std::max(v, 0.0);
    }
    input = &post;
  }
  return ws.pre.back()[0];
}

double RowLoss(double logit, int label, double pos_weight) {
  const double weight = label == 1 ? pos_weight : 1.0;
  return weight * (Softplus(logit) - label * logit);
}

struct Candidate {
  double learning_rate;
  std::vector<int> hidden_sizes;
};

class Adam {
 public:
  explicit Adam(const std::vector<DenseLayer>& shape)
      : m_(ZerosLike(shape)), v_(ZerosLike(shape)) {}

  void Step(std::vector<DenseLayer>& params,
            const std::vector<DenseLayer>& grad, double lr) {
    ++t_;
    const double c1 = 1.0 - std::pow(kBeta1, t_);
    const double c2 = 1.0 - std::pow(kBeta2, t_);
    for (std::size_t l = 0; l < params.size(); ++l) {
      Update(params[l].weights, grad[l].weights, m_[l].weights, v_[l].weights,
             lr, c1, c2);
      Update(params[l].bias, grad[l].bias, m_[l].bias, v_[l].bias, lr, c1, c2);
    }
  }

 private:
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEpsilon = 1e-8;

  static void Update(std::vector<double>& p, const std::vector<double>& g,
                     std::vector<double>& m, std::vector<double>& v, double lr,
                     double c1, double c2) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * g[i];
      v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * g[i] * g[i];
      p[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + kEpsilon);
    }
  }

  std::vector<DenseLayer> m_;
  std::vector<DenseLayer> v_;
  int t_ = 0;
};

}  // namespace

void TrainConfig::Validate() const {
  if (learning_rate <= 0) {
    throw Error(ErrorCode::kConfig, "learning_rate must be positive",
                "learning_rate");
  }
  if (batch_size <= 0) {
    throw Error(ErrorCode::kConfig, "batch_size must be positive",
                "batch_size");
  }
  if (epochs <= 0) {
    throw Error(ErrorCode::kConfig, "epochs must be positive", "epochs");
  }
  if (pos_weight <= 0) {
    throw Error(ErrorCode::kConfig, "pos_weight must be positive",
                "pos_weight");
  }
  for (double lr : grid_learning_rates) {
    if (lr <= 0) {
      throw Error(ErrorCode::kConfig, "grid learning rates must be positive",
                  "grid_learning_rates");
    }
  }
  auto check_hidden = [](const std::vector<int>& sizes) {
    for (int h : sizes) {
      if (h <= 0) {
        throw Error(ErrorCode::kConfig, "hidden sizes must be positive",
                    "hidden_sizes");
      }
    }
  };
  check_hidden(hidden_sizes);
  for (const auto& sizes : grid_hidden_sizes) check_hidden(sizes);
}

Json ToJson(const TrainConfig& c) {
  return {{"kind", ModelKindName(c.kind)},
          {"hidden_sizes", c.hidden_sizes},
          {"learning_rate", c.learning_rate},
          {"batch_size", c.batch_size},
          {"epochs", c.epochs},
          {"seed", c.seed},
          {"pos_weight", c.pos_weight},
          {"grid_learning_rates", c.grid_learning_rates},
          {"grid_hidden_sizes", c.grid_hidden_sizes}};
}

TrainConfig TrainConfigFromJson(const Json& json) {
  TrainConfig c;
  if (json.is_null()) return c;
  const std::string path = "/model";
  RejectUnknownFields(json,
                      {"kind", "hidden_sizes", "learning_rate", "batch_size",
                       "epochs", "seed", "pos_weight", "grid_learning_rates",
                       "grid_hidden_sizes"},
                      path);
  if (json.contains("kind")) {
    c.kind = ParseModelKind(RequireString(json, "kind", path));
  }
  if (json.contains("hidden_sizes")) {
    c.hidden_sizes = json.at("hidden_sizes").get<std::vector<int>>();
  }
  if (json.contains("learning_rate")) {
    c.learning_rate = RequireNumber(json, "learning_rate", path);
  }
  if (json.contains("batch_size")) {
    c.batch_size = static_cast<int>(RequireInt(json, "batch_size", path));
  }
  if (json.contains("epochs")) {
    c.epochs = static_cast<int>(RequireInt(json, "epochs", path));
  }
  if (json.contains("seed")) {
    c.seed = static_cast<std::uint64_t>(RequireInt(json, "seed", path));
  }
  if (json.contains("pos_weight")) {
    c.pos_weight = RequireNumber(json, "pos_weight", path);
  }
  if (json.contains("grid_learning_rates")) {
    c.grid_learning_rates =
        json.at("grid_learning_rates").get<std::vector<double>>();
  }
  if (json.contains("grid_hidden_sizes")) {
    c.grid_hidden_sizes =
        json.at("grid_hidden_sizes").get<std::vector<std::vector<int>>>();
  }
  c.Validate();
  return c;
}

LossAndGradient ComputeLossAndGradient(const std::vector<DenseLayer>& layers,
                                       const Rows& rows,
                                       std::span<const int> labels,
                                       std::span<const std::size_t> batch,
                                       double pos_weight) {
  LossAndGradient result;
  result.gradient = ZerosLike(layers);
  if (batch.empty()) return result;
  const double scale = 1.0 / static_cast<double>(batch.size());
  Workspace ws;
  for (std::size_t r : batch) {
    const std::vector<double>& x = rows[r];
    const int y = labels[r];
    const double logit = Forward(layers, x, ws);
    const double weight = y == 1 ? pos_weight : 1.0;
    result.loss += RowLoss(logit, y, pos_weight);

    ws.delta.assign(1, weight * (Sigmoid(logit) - y) * scale);
    for (std::size_t l = layers.size(); l-- > 0;) {
      const DenseLayer& layer = layers[l];
      DenseLayer& g = result.gradient[l];
      const std::vector<double>& input = l == 0 ? x : ws.post[l - 1];
      for (int o = 0; o < layer.out; ++o) {
        const double d = ws.delta[o];
        if (d == 0.0) continue;
        g.bias[o] += d;
        double* gw = g.weights.data() + static_cast<std::size_t>(o) * layer.in;
        for (int i = 0; i < layer.in; ++i) gw[i] += d * input[i];
      }
      if (l == 0) break;
      ws.delta_prev.assign(static_cast<std::size_t>(layer.in), 0.0);
      for (int o = 0; o < layer.out; ++o) {
        const double d = ws.delta[o];
        if (d == 0.0) continue;
        const double* w =
            layer.weights.data() + static_cast<std::size_t>(o) * layer.in;
        for (int i = 0; i < layer.in; ++i) ws.delta_prev[i] += w[i] * d;
      }
      const std::vector<double>& prev_pre = ws.pre[l - 1];
      if (layers[l - 1].activation == Activation::kRelu) {
        for (int i = 0; i < layer.in; ++i) {
          if (prev_pre[i] <= 0.0) ws.delta_prev[i] = 0.0;
        }
      }
      ws.delta.swap(ws.delta_prev);
    }
  }
  result.loss *= scale;
  return result;
}

double ComputeLoss(const std::vector<DenseLayer>& layers, const Rows& rows,
                   std::span<const int> labels,
                   std::span<const std::size_t> batch, double pos_weight) {
  if (batch.empty()) return 0.0;
  Workspace ws;
  double total = 0.0;
  for (std::size_t r : batch) {
    total += RowLoss(Forward(layers, rows[r], ws), labels[r], pos_weight);
  }
  return total / static_cast<double>(batch.size());
}

std::vector<DenseLayer> InitLayers(int input_width,
                                   const std::vector<int>& hidden_sizes,
                                   std::uint64_t seed) {
  Rng rng(seed);
  std::vector<DenseLayer> layers;
  int in = input_width;
  for (int h : hidden_sizes) {
    DenseLayer layer{in, h, {}, std::vector<double>(h, 0.0),
                     Activation::kRelu};
    const double limit = std::sqrt(6.0 / (in + h));
    layer.weights.resize(static_cast<std::size_t>(in) * h);
    for (double& w : layer.weights) w = rng.Uniform(-limit, limit);
    layers.push_back(std::move(layer));
    in = h;
  }
  DenseLayer output{in, 1, std::vector<double>(in, 0.0), {0.0},
                    Activation::kSigmoid};
  if (!hidden_sizes.empty()) {
    const double limit = std::sqrt(6.0 / (in + 1));
    for (double& w : output.weights) w = rng.Uniform(-limit, limit);
  }
  layers.push_back(std::move(output));
  return layers;
}

RiskModel Train(const Rows& rows, std::span<const int> labels,
                const std::vector<std::string>& feature_names,
                const Split& split, const TrainConfig& config) {
  config.Validate();
  if (rows.empty() || rows.size() != labels.size()) {
    throw Error(ErrorCode::kShape, "rows and labels differ in length");
  }
  const int width = static_cast<int>(rows.front().size());
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != width) {
      throw Error(ErrorCode::kShape, "rows have unequal widths");
    }
  }
  int positives = 0;
  for (std::size_t r : split.train) positives += labels[r] == 1 ? 1 : 0;
  if (positives == 0 || positives == static_cast<int>(split.train.size())) {
    throw Error(ErrorCode::kDegenerateLabel,
                "training labels contain a single class");
  }

  std::vector<Candidate> candidates;
  const std::vector<double> rates = config.grid_learning_rates.empty()
                                        ? std::vector<double>{config.learning_rate}
                                        : config.grid_learning_rates;
  std::vector<std::vector<int>> hidden_options;
  if (config.kind == ModelKind::kLR) {
    hidden_options = {{}};
  } else if (config.grid_hidden_sizes.empty()) {
    hidden_options = {config.hidden_sizes};
  } else {
    hidden_options = config.grid_hidden_sizes;
  }
  for (const auto& hidden : hidden_options) {
    for (double lr : rates) candidates.push_back({lr, hidden});
  }

  bool validation_has_both = false;
  {
    int vpos = 0;
    for (std::size_t r : split.validation) vpos += labels[r] == 1 ? 1 : 0;
    validation_has_both =
        vpos > 0 && vpos < static_cast<int>(split.validation.size());
  }

  std::vector<CandidateResult> results;
  std::vector<DenseLayer> best_layers;
  TrainMeta best_meta;
  int best = -1;
  for (const Candidate& candidate : candidates) {
    std::vector<DenseLayer> layers =
        InitLayers(width, candidate.hidden_sizes, config.seed);
    Adam adam(layers);
    Rng rng(config.seed ^ 0xba7c4ULL);
    TrainMeta meta;
    meta.seed = config.seed;
    meta.epochs = config.epochs;
    meta.batch_size = config.batch_size;
    meta.learning_rate = candidate.learning_rate;
    meta.pos_weight = config.pos_weight;
    meta.hidden_sizes = candidate.hidden_sizes;
    meta.initial_loss =
        ComputeLoss(layers, rows, labels, split.train, config.pos_weight);

    std::vector<std::size_t> order = split.train;
    const std::size_t batch = static_cast<std::size_t>(config.batch_size);
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
      rng.Shuffle(order);
      for (std::size_t start = 0; start < order.size(); start += batch) {
        const std::size_t len = std::min(batch, order.size() - start);
        LossAndGradient step = ComputeLossAndGradient(
            layers, rows, labels,
            std::span<const std::size_t>(order.data() + start, len),
            config.pos_weight);
        if (!std::isfinite(step.loss)) {
          throw Error(ErrorCode::kDivergence,
                      "training loss became non-finite at epoch " +
                          std::to_string(epoch));
        }
        adam.Step(layers, step.gradient, candidate.learning_rate);
      }
      const double loss =
          ComputeLoss(layers, rows, labels, split.train, config.pos_weight);
      if (!std::isfinite(loss)) {
        throw Error(ErrorCode::kDivergence,
                    "training loss became non-finite at epoch " +
                        std::to_string(epoch));
      }
      meta.loss_history.push_back(loss);
    }
    meta.final_loss = meta.loss_history.back();

    CandidateResult result{candidate.learning_rate, candidate.hidden_sizes,
                           0.0, 0.0};
    if (validation_has_both) {
      std::vector<double> scores;
      std::vector<int> val_labels;
      for (std::size_t r : split.validation) {
        scores.push_back(Sigmoid(ForwardLogit(layers, rows[r])));
        val_labels.push_back(labels[r]);
      }
      result.validation_auc_roc = AucRoc(scores, val_labels);
      result.validation_auc_prc = AveragePrecision(scores, val_labels);
    }
    results.push_back(result);
    const bool better =
        best < 0 ||
        result.validation_auc_roc > results[best].validation_auc_roc ||
        (result.validation_auc_roc == results[best].validation_auc_roc &&
         result.validation_auc_prc > results[best].validation_auc_prc);
    if (better) {
      best = static_cast<int>(results.size()) - 1;
      best_layers = std::move(layers);
      best_meta = std::move(meta);
    }
  }
  best_meta.candidates = results;
  return RiskModel(config.kind, std::move(best_layers), feature_names,
                   std::move(best_meta));
}

}  // namespace ckdctx::risk
