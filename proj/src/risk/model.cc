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

#include "ckdctx/risk/model.h"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "ckdctx/common/error.h"

namespace ckdctx::risk {
namespace {

constexpr int kFormatVersion = 1;

std::string_view ActivationName(Activation a) {
  switch (a) {
    case Activation::kIdentity: return "identity";
    case Activation::kRelu: return "relu";
    case Activation::kSigmoid: return "sigmoid";
  }
  return "identity";
}

Activation ParseActivation(const std::string& text, const std::string& path) {
  if (text == "identity") return Activation::kIdentity;
  if (text == "relu") return Activation::kRelu;
  if (text == "sigmoid") return Activation::kSigmoid;
  throw Error(ErrorCode::kValidation, "unknown activation '" + text + "'",
              path);
}

}  // namespace

std::string_view ModelKindName(ModelKind kind) {
  return kind == ModelKind::kLR ? "LR" : "MLP";
}

ModelKind ParseModelKind(std::string_view text) {
  std::string upper(text);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  if (upper == "LR") return ModelKind::kLR;
  if (upper == "MLP") return ModelKind::kMLP;
  throw Error(ErrorCode::kConfig,
              "unknown model kind '" + std::string(text) + "'", "kind");
}

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double ForwardLogit(const std::vector<DenseLayer>& layers,
                    std::span<const double> x) {
  std::vector<double> current(x.begin(), x.end());
  std::vector<double> next;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const DenseLayer& layer = layers[l];
    next.assign(layer.bias.begin(), layer.bias.end());
    for (int o = 0; o < layer.out; ++o) {
      const double* w = layer.weights.data() + static_cast<std::size_t>(o) *
                                                   layer.in;
      double acc = next[o];
      for (int i = 0; i < layer.in; ++i) acc += w[i] * current[i];
      next[o] = acc;
    }
    if (l + 1 < layers.size()) {
      if (layer.activation == Activation::kRelu) {
        for (double& v : next) v = std::max(v, 0.0);
      } else if (layer.activation == Activation::kSigmoid) {
        for (double& v : next) v = Sigmoid(v);
      }
    }
    current.swap(next);
  }
  return current[0];
}

RiskModel::RiskModel(ModelKind kind, std::vector<DenseLayer> layers,
                     std::vector<std::string> feature_names, TrainMeta meta)
    : kind_(kind),
      layers_(std::move(layers)),
      feature_names_(std::move(feature_names)),
      meta_(std::move(meta)) {
  if (layers_.empty()) {
    throw Error(ErrorCode::kShape, "model has no layers");
  }
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const DenseLayer& layer = layers_[l];
    if (layer.in <= 0 || layer.out <= 0 ||
        layer.weights.size() != static_cast<std::size_t>(layer.in) *
                                    static_cast<std::size_t>(layer.out) ||
        layer.bias.size() != static_cast<std::size_t>(layer.out)) {
      throw Error(ErrorCode::kShape,
                  "layer " + std::to_string(l) + " has inconsistent shapes");
    }
    if (l > 0 && layer.in != layers_[l - 1].out) {
      throw Error(ErrorCode::kShape,
                  "layer " + std::to_string(l) + " does not chain");
    }
  }
  if (layers_.back().out != 1 ||
      layers_.back().activation != Activation::kSigmoid) {
    throw Error(ErrorCode::kShape, "model must end in one sigmoid unit");
  }
  if (kind_ == ModelKind::kLR && layers_.size() != 1) {
    throw Error(ErrorCode::kShape, "an LR model has exactly one layer");
  }
  if (!feature_names_.empty() &&
      feature_names_.size() != static_cast<std::size_t>(layers_[0].in)) {
    throw Error(ErrorCode::kShape, "feature names do not match input width");
  }
}

double RiskModel::Logit(std::span<const double> x) const {
  if (x.size() != input_width()) {
    throw Error(ErrorCode::kShape, "input has width " +
                                       std::to_string(x.size()) +
                                       ", model expects " +
                                       std::to_string(input_width()));
  }
  return ForwardLogit(layers_, x);
}

double RiskModel::PredictProba(std::span<const double> x) const {
  return std::clamp(Sigmoid(Logit(x)), kMinProbability, 1.0 - kMinProbability);
}

Json RiskModel::ToJson() const {
  Json layers = Json::array();
  for (const DenseLayer& layer : layers_) {
    layers.push_back({{"in", layer.in},
                      {"out", layer.out},
                      {"activation", ActivationName(layer.activation)},
                      {"weights", layer.weights},
                      {"bias", layer.bias}});
  }
  Json candidates = Json::array();
  for (const CandidateResult& c : meta_.candidates) {
    candidates.push_back({{"learning_rate", c.learning_rate},
                          {"hidden_sizes", c.hidden_sizes},
                          {"validation_auc_roc", c.validation_auc_roc},
                          {"validation_auc_prc", c.validation_auc_prc}});
  }
  return {{"format_version", kFormatVersion},
          {"kind", ModelKindName(kind_)},
          {"feature_names", feature_names_},
          {"layers", std::move(layers)},
          {"train_meta",
           {{"seed", meta_.seed},
            {"epochs", meta_.epochs},
            {"batch_size", meta_.batch_size},
            {"learning_rate", meta_.learning_rate},
            {"pos_weight", meta_.pos_weight},
            {"hidden_sizes", meta_.hidden_sizes},
            {"initial_loss", meta_.initial_loss},
            {"final_loss", meta_.final_loss},
            {"loss_history", meta_.loss_history},
            {"candidates", std::move(candidates)}}}};
}

RiskModel RiskModel::FromJson(const Json& json) {
  const std::string root;
  const std::int64_t version = RequireInt(json, "format_version", root);
  if (version != kFormatVersion) {
    throw Error(ErrorCode::kUnsupportedVersion,
                "model format version " + std::to_string(version) +
                    " is not supported",
                "/format_version");
  }
  const ModelKind kind = ParseModelKind(RequireString(json, "kind", root));
  std::vector<DenseLayer> layers;
  const Json& jlayers = RequireArray(json, "layers", root);
  for (std::size_t l = 0; l < jlayers.size(); ++l) {
    const std::string path = "/layers/" + std::to_string(l);
    DenseLayer layer;
    layer.in = static_cast<int>(RequireInt(jlayers[l], "in", path));
    layer.out = static_cast<int>(RequireInt(jlayers[l], "out", path));
    layer.activation = ParseActivation(
        RequireString(jlayers[l], "activation", path), path + "/activation");
    layer.weights = RequireArray(jlayers[l], "weights", path)
                        .get<std::vector<double>>();
    layer.bias =
        RequireArray(jlayers[l], "bias", path).get<std::vector<double>>();
    layers.push_back(std::move(layer));
  }
  const Json& jm = RequireField(json, "train_meta", root);
  TrainMeta meta;
  meta.seed = static_cast<std::uint64_t>(RequireInt(jm, "seed", "/train_meta"));
  meta.epochs = static_cast<int>(RequireInt(jm, "epochs", "/train_meta"));
  meta.batch_size =
      static_cast<int>(RequireInt(jm, "batch_size", "/train_meta"));
  meta.learning_rate = RequireNumber(jm, "learning_rate", "/train_meta");
  meta.pos_weight = RequireNumber(jm, "pos_weight", "/train_meta");
  meta.hidden_sizes =
      RequireArray(jm, "hidden_sizes", "/train_meta").get<std::vector<int>>();
  meta.initial_loss = RequireNumber(jm, "initial_loss", "/train_meta");
  meta.final_loss = RequireNumber(jm, "final_loss", "/train_meta");
  meta.loss_history = RequireArray(jm, "loss_history", "/train_meta")
                          .get<std::vector<double>>();
  for (const Json& c : RequireArray(jm, "candidates", "/train_meta")) {
    const std::string path = "/train_meta/candidates";
    meta.candidates.push_back(
        {RequireNumber(c, "learning_rate", path),
         RequireArray(c, "hidden_sizes", path).get<std::vector<int>>(),
         RequireNumber(c, "validation_auc_roc", path),
         RequireNumber(c, "validation_auc_prc", path)});
  }
  return RiskModel(
      kind, std::move(layers),
      RequireArray(json, "feature_names", root).get<std::vector<std::string>>(),
      std::move(meta));
}

}  // namespace ckdctx::risk
