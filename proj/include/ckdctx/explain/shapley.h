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

#ifndef CKDCTX_EXPLAIN_SHAPLEY_H_
#define CKDCTX_EXPLAIN_SHAPLEY_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ckdctx/common/json_util.h"
#include "ckdctx/risk/model.h"

namespace ckdctx::explain {

// Model output for a (possibly masked) input vector.
using ValueFunction = std::function<double(std::span<const double>)>;

enum class ShapleyMethod { kExact, kSampled };

// Per-feature Shapley values of one prediction relative to a reference
// input. Features outside `players` keep the patient's value in every
// coalition and receive phi = 0.
struct Attribution {
  std::string patient_id;
  std::vector<std::string> feature_names;
  std::vector<double> feature_values;
  std::vector<int> players;
  double baseline_value = 0.0;  // output with every player at the reference
  double prediction = 0.0;      // output at the patient's input
  std::vector<double> phi;
  std::vector<double> standard_error;  // sampled estimates only
  ShapleyMethod method = ShapleyMethod::kExact;
  int n_samples = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const Attribution&, const Attribution&) = default;
};

inline constexpr std::size_t kDefaultExactFeatureCap = 20;
inline constexpr int kMinShapleySamples = 100;

// Enumerates all 2^|players| coalitions. v(S) evaluates `value` with the
// players in S taken from `x` and the remaining players from `reference`.
// Refuses (kRefused) when there are more players than `max_players`.
Attribution ShapleyExact(const ValueFunction& value, std::span<const double> x,
                         std::span<const double> reference,
                         std::optional<std::vector<int>> players = std::nullopt,
                         std::size_t max_players = kDefaultExactFeatureCap);

// Monte Carlo permutation estimator. Each sampled ordering contributes the
// marginal gains of adding players one at a time, so every estimate sums to
// value(x) - value(reference) exactly.
Attribution ShapleySampled(const ValueFunction& value,
                           std::span<const double> x,
                           std::span<const double> reference, int n_samples,
                           std::uint64_t seed,
                           std::optional<std::vector<int>> players =
                               std::nullopt);

// Convenience wrappers binding a risk model's predicted probability and
// feature names.
Attribution ShapleyExact(const risk::RiskModel& model,
                         std::span<const double> x,
                         std::span<const double> reference,
                         std::optional<std::vector<int>> players = std::nullopt,
                         std::size_t max_players = kDefaultExactFeatureCap);
Attribution ShapleySampled(const risk::RiskModel& model,
                           std::span<const double> x,
                           std::span<const double> reference, int n_samples,
                           std::uint64_t seed);

struct ExplainOptions {
  std::size_t exact_cap = kDefaultExactFeatureCap;
  int n_samples = 1000;
  std::uint64_t seed = 0;

  friend bool operator==(const ExplainOptions&, const ExplainOptions&) =
      default;
};

// Exact attribution when the model has at most `exact_cap` features, the
// sampled estimator otherwise. The sampling seed mixes in the patient id so
// each patient's estimate is independent of which others are explained.
Attribution ExplainPatient(const risk::RiskModel& model,
                           std::span<const double> x,
                           std::span<const double> reference,
                           const std::string& patient_id,
                           const ExplainOptions& options);

Json ToJson(const ExplainOptions& options);
ExplainOptions ExplainOptionsFromJson(const Json& json);

// Column means of the given rows; the reference input for attributions.
std::vector<double> MeanReference(const std::vector<std::vector<double>>& rows,
                                  std::span<const std::size_t> indices);

Json ToJson(const Attribution& attribution);
Attribution AttributionFromJson(const Json& json);

}  // namespace ckdctx::explain

#endif  // CKDCTX_EXPLAIN_SHAPLEY_H_
