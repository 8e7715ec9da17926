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

#include "ckdctx/explain/shapley.h"

#include <bit>
#include <cmath>
#include <numeric>

#include "ckdctx/common/error.h"
#include "ckdctx/common/rng.h"

namespace ckdctx::explain {
namespace {

std::vector<int> ResolvePlayers(std::optional<std::vector<int>> players,
                                std::size_t width) {
  std::vector<int> resolved;
  if (!players) {
    resolved.resize(width);
    std::iota(resolved.begin(), resolved.end(), 0);
    return resolved;
  }
  std::vector<bool> seen(width, false);
  for (int p : *players) {
    if (p < 0 || static_cast<std::size_t>(p) >= width) {
      throw Error(ErrorCode::kInput,
                  "player index " + std::to_string(p) + " out of range");
    }
    if (seen[p]) {
      throw Error(ErrorCode::kInput,
                  "duplicate player index " + std::to_string(p));
    }
    seen[p] = true;
  }
  return std::move(*players);
}

Attribution Prepare(std::span<const double> x, std::span<const double> reference,
                    std::vector<int> players) {
  if (x.size() != reference.size()) {
    throw Error(ErrorCode::kShape, "input has " + std::to_string(x.size()) +
                                       " features but the reference has " +
                                       std::to_string(reference.size()));
  }
  Attribution out;
  out.feature_values.assign(x.begin(), x.end());
  out.players = std::move(players);
  out.phi.assign(x.size(), 0.0);
  return out;
}

}  // namespace

Attribution ShapleyExact(const ValueFunction& value, std::span<const double> x,
                         std::span<const double> reference,
                         std::optional<std::vector<int>> players,
                         std::size_t max_players) {
  Attribution out =
      Prepare(x, reference, ResolvePlayers(std::move(players), x.size()));
  const std::size_t m = out.players.size();
  if (m > max_players) {
    throw Error(ErrorCode::kRefused,
                "exact Shapley over " + std::to_string(m) +
                    " features exceeds the cap of " +
                    std::to_string(max_players) +
                    "; use the sampled estimator or restrict the features");
  }
  const std::size_t n_coalitions = std::size_t{1} << m;
  std::vector<double> v(n_coalitions);
  std::vector<double> z(x.begin(), x.end());
  for (std::size_t mask = 0; mask < n_coalitions; ++mask) {
    for (std::size_t j = 0; j < m; ++j) {
      const int f = out.players[j];
      z[f] = (mask >> j) & 1 ? x[f] : reference[f];
    }
    v[mask] = value(z);
  }
  // weight[s] = s! (m - s - 1)! / m!
  std::vector<double> weight(m, 0.0);
  for (std::size_t s = 0; s < m; ++s) {
    weight[s] = std::exp(std::lgamma(static_cast<double>(s) + 1) +
                         std::lgamma(static_cast<double>(m - s)) -
                         std::lgamma(static_cast<double>(m) + 1));
  }
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t bit = std::size_t{1} << j;
    double phi = 0.0;
    for (std::size_t mask = 0; mask < n_coalitions; ++mask) {
      if (mask & bit) continue;
      phi += weight[std::popcount(mask)] * (v[mask | bit] - v[mask]);
    }
    out.phi[out.players[j]] = phi;
  }
  out.baseline_value = v[0];
  out.prediction = v[n_coalitions - 1];
  out.method = ShapleyMethod::kExact;
  return out;
}

Attribution ShapleySampled(const ValueFunction& value,
                           std::span<const double> x,
                           std::span<const double> reference, int n_samples,
                           std::uint64_t seed,
                           std::optional<std::vector<int>> players) {
  if (n_samples < kMinShapleySamples) {
    throw Error(ErrorCode::kConfig,
                "n_samples must be at least " +
                    std::to_string(kMinShapleySamples) + ", got " +
                    std::to_string(n_samples),
                "n_samples");
  }
  Attribution out =
      Prepare(x, reference, ResolvePlayers(std::move(players), x.size()));
  const std::size_t m = out.players.size();
  std::vector<double> z(x.begin(), x.end());
  for (int f : out.players) z[f] = reference[f];
  const std::vector<double> start = z;
  out.baseline_value = value(start);
  out.prediction = value(x);

  std::vector<double> sum(m, 0.0);
  std::vector<double> sum_sq(m, 0.0);
  Rng rng(seed);
  for (int s = 0; s < n_samples; ++s) {
    const std::vector<std::size_t> order = rng.Permutation(m);
    z = start;
    double previous = out.baseline_value;
    for (std::size_t step = 0; step < m; ++step) {
      const std::size_t j = order[step];
      const int f = out.players[j];
      z[f] = x[f];
      // The last step is pinned to value(x) so each sample is efficient.
      const double current = step + 1 == m ? out.prediction : value(z);
      const double gain = current - previous;
      sum[j] += gain;
      sum_sq[j] += gain * gain;
      previous = current;
    }
  }
  out.standard_error.assign(x.size(), 0.0);
  const double n = n_samples;
  for (std::size_t j = 0; j < m; ++j) {
    const double mean = sum[j] / n;
    const double var = std::max(0.0, (sum_sq[j] - n * mean * mean) / (n - 1));
    out.phi[out.players[j]] = mean;
    out.standard_error[out.players[j]] = std::sqrt(var / n);
  }
  out.method = ShapleyMethod::kSampled;
  out.n_samples = n_samples;
  out.seed = seed;
  return out;
}

Attribution ShapleyExact(const risk::RiskModel& model,
                         std::span<const double> x,
                         std::span<const double> reference,
                         std::optional<std::vector<int>> players,
                         std::size_t max_players) {
  Attribution out = ShapleyExact(
      [&model](std::span<const double> z) { return model.PredictProba(z); }, x,
      reference, std::move(players), max_players);
  out.feature_names = model.feature_names();
  return out;
}

Attribution ShapleySampled(const risk::RiskModel& model,
                           std::span<const double> x,
                           std::span<const double> reference, int n_samples,
                           std::uint64_t seed) {
  Attribution out = ShapleySampled(
      [&model](std::span<const double> z) { return model.PredictProba(z); }, x,
      reference, n_samples, seed);
  out.feature_names = model.feature_names();
  return out;
}

Attribution ExplainPatient(const risk::RiskModel& model,
                           std::span<const double> x,
                           std::span<const double> reference,
                           const std::string& patient_id,
                           const ExplainOptions& options) {
  Attribution out =
      model.feature_names().size() <= options.exact_cap
          ? ShapleyExact(model, x, reference, std::nullopt, options.exact_cap)
          : ShapleySampled(model, x, reference, options.n_samples,
                           options.seed ^ StableHash(patient_id));
  out.patient_id = patient_id;
  return out;
}

Json ToJson(const ExplainOptions& options) {
  return {{"exact_cap", options.exact_cap},
          {"n_samples", options.n_samples},
          {"seed", options.seed}};
}

ExplainOptions ExplainOptionsFromJson(const Json& json) {
  const std::string root;
  RejectUnknownFields(json, {"exact_cap", "n_samples", "seed"}, root);
  ExplainOptions options;
  if (json.contains("exact_cap")) {
    options.exact_cap =
        static_cast<std::size_t>(RequireInt(json, "exact_cap", root));
  }
  if (json.contains("n_samples")) {
    options.n_samples = static_cast<int>(RequireInt(json, "n_samples", root));
  }
  if (json.contains("seed")) {
    const Json& seed = json["seed"];
    if (!seed.is_number_unsigned()) {
      throw Error(ErrorCode::kValidation,
                  "expected an unsigned integer at /seed", "/seed");
    }
    options.seed = seed.get<std::uint64_t>();
  }
  if (options.n_samples < kMinShapleySamples) {
    throw Error(ErrorCode::kConfig,
                "n_samples must be at least " +
                    std::to_string(kMinShapleySamples),
                "n_samples");
  }
  return options;
}

std::vector<double> MeanReference(const std::vector<std::vector<double>>& rows,
                                  std::span<const std::size_t> indices) {
  if (indices.empty()) {
    throw Error(ErrorCode::kInput, "reference needs at least one row");
  }
  std::vector<double> mean(rows[indices[0]].size(), 0.0);
  for (std::size_t i : indices) {
    for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += rows[i][j];
  }
  for (double& m : mean) m /= static_cast<double>(indices.size());
  return mean;
}

Json ToJson(const Attribution& a) {
  Json json = {
      {"patient_id", a.patient_id},
      {"feature_names", a.feature_names},
      {"feature_values", a.feature_values},
      {"players", a.players},
      {"baseline_value", a.baseline_value},
      {"prediction", a.prediction},
      {"phi", a.phi},
  };
  if (a.method == ShapleyMethod::kExact) {
    json["method"] = {{"kind", "exact"}};
  } else {
    json["method"] = {
        {"kind", "sampled"}, {"n_samples", a.n_samples}, {"seed", a.seed}};
    json["standard_error"] = a.standard_error;
  }
  return json;
}

Attribution AttributionFromJson(const Json& json) {
  const std::string path = "/attribution";
  if (!json.is_object()) {
    throw Error(ErrorCode::kValidation, "attribution must be an object", path);
  }
  Attribution a;
  a.patient_id = RequireString(json, "patient_id", path);
  try {
    a.feature_names =
        RequireArray(json, "feature_names", path).get<std::vector<std::string>>();
    a.feature_values =
        RequireArray(json, "feature_values", path).get<std::vector<double>>();
    a.players = RequireArray(json, "players", path).get<std::vector<int>>();
    a.phi = RequireArray(json, "phi", path).get<std::vector<double>>();
    if (json.contains("standard_error")) {
      a.standard_error = json.at("standard_error").get<std::vector<double>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kValidation, e.what(), path);
  }
  a.baseline_value = RequireNumber(json, "baseline_value", path);
  a.prediction = RequireNumber(json, "prediction", path);
  const Json& method = RequireField(json, "method", path);
  const std::string kind = RequireString(method, "kind", path + "/method");
  if (kind == "exact") {
    a.method = ShapleyMethod::kExact;
  } else if (kind == "sampled") {
    a.method = ShapleyMethod::kSampled;
    a.n_samples =
        static_cast<int>(RequireInt(method, "n_samples", path + "/method"));
    const Json& seed = RequireField(method, "seed", path + "/method");
    if (!seed.is_number_unsigned()) {
      throw Error(ErrorCode::kValidation, "seed must be a nonnegative integer",
                  path + "/method/seed");
    }
    a.seed = seed.get<std::uint64_t>();
  } else {
    throw Error(ErrorCode::kValidation, "unknown method '" + kind + "'",
                path + "/method/kind");
  }
  if (a.phi.size() != a.feature_values.size()) {
    throw Error(ErrorCode::kValidation,
                "phi and feature_values differ in length", path + "/phi");
  }
  return a;
}

}  // namespace ckdctx::explain
