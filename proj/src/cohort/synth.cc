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

#include "ckdctx/cohort/synth.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "ckdctx/common/error.h"
#include "ckdctx/common/rng.h"

namespace ckdctx::cohort {
namespace {

double Sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }
double Logit(double p) { return std::log(p / (1.0 - p)); }

constexpr const char* kT2dmCodes[] = {"E11.9", "E11.9", "E11.65", "250.00",
                                      "250.02"};
constexpr const char* kT1dCodes[] = {"E10.9", "250.01"};
constexpr const char* kCkdCodes[] = {"N18.3", "N18.9", "585.3", "585.9"};

template <std::size_t N>
const char* Pick(Rng& rng, const char* const (&options)[N]) {
  return options[rng.Below(N)];
}

}  // namespace

void SynthConfig::Validate() const {
  if (n_patients <= 0) {
    throw Error(ErrorCode::kConfig, "n_patients must be positive",
                "n_patients");
  }
  if (n_ccs_features <= 0) {
    throw Error(ErrorCode::kConfig, "n_ccs_features must be positive",
                "n_ccs_features");
  }
  if (static_cast<int>(planted_weights.size()) != n_ccs_features) {
    throw Error(ErrorCode::kConfig,
                "planted_weights has " +
                    std::to_string(planted_weights.size()) +
                    " entries, expected " + std::to_string(n_ccs_features),
                "planted_weights");
  }
  if (!(base_rate > 0.0 && base_rate < 1.0)) {
    throw Error(ErrorCode::kConfig, "base_rate must lie in (0, 1)",
                "base_rate");
  }
  if (!(prevalence_min > 0.0 && prevalence_min <= prevalence_max &&
        prevalence_max < 1.0)) {
    throw Error(ErrorCode::kConfig, "invalid prevalence range",
                "prevalence_min");
  }
  const double violations = violate_age + violate_visits + violate_enrollment +
                            violate_t1d + violate_prevalent_ckd;
  if (violations < 0.0 || violations > 1.0) {
    throw Error(ErrorCode::kConfig, "violation fractions must sum to [0, 1]",
                "violate_age");
  }
  for (const XorTerm& term : xor_terms) {
    if (term.first < 0 || term.first >= n_ccs_features || term.second < 0 ||
        term.second >= n_ccs_features || term.first == term.second) {
      throw Error(ErrorCode::kConfig, "xor term indexes out of range",
                  "xor_terms");
    }
  }
  if (horizon_days <= 0) {
    throw Error(ErrorCode::kConfig, "horizon_days must be positive",
                "horizon_days");
  }
}

std::vector<double> DefaultPlantedWeights(int n_features, std::uint64_t seed) {
  Rng rng(seed ^ 0x5eedf00dULL);
  std::vector<double> weights(static_cast<std::size_t>(n_features), 0.0);
  for (double& w : weights) {
    if (rng.Bernoulli(0.3)) continue;  // noise feature
    const double magnitude = rng.Uniform(0.8, 2.5);
    w = rng.Bernoulli(0.7) ? magnitude : -magnitude;
  }
  return weights;
}

std::vector<int> ExposureCcs(const SynthConfig& config, const CcsMap& ccs_map) {
  std::vector<int> out;
  for (int ccs : ccs_map.CcsCodes()) {
    if (std::find(config.reserved_ccs.begin(), config.reserved_ccs.end(),
                  ccs) != config.reserved_ccs.end()) {
      continue;
    }
    out.push_back(ccs);
    if (static_cast<int>(out.size()) == config.n_ccs_features) break;
  }
  if (static_cast<int>(out.size()) < config.n_ccs_features) {
    throw Error(ErrorCode::kConfig,
                "CCS map offers " + std::to_string(out.size()) +
                    " exposure categories, n_ccs_features asks for " +
                    std::to_string(config.n_ccs_features),
                "n_ccs_features");
  }
  return out;
}

std::vector<PatientRecord> GenerateClaims(const SynthConfig& config,
                                          const CcsMap& ccs_map) {
  config.Validate();
  const std::vector<int> exposure_ccs = ExposureCcs(config, ccs_map);
  const std::size_t d = exposure_ccs.size();

  std::vector<std::vector<CodePattern>> exposure_patterns(d);
  // Exposure codes must not collide with the codes that define the cohort
  // and the outcome (e.g. 403.x is both hypertensive and a CKD code).
  const CohortConfig clinical;
  for (std::size_t j = 0; j < d; ++j) {
    for (const CodePattern& pattern : ccs_map.PatternsFor(exposure_ccs[j])) {
      const std::string code = pattern.Instantiate();
      if (clinical.t2dm_codes.Matches(code) ||
          clinical.t1d_codes.Matches(code) ||
          clinical.ckd_codes.Matches(code)) {
        continue;
      }
      exposure_patterns[j].push_back(pattern);
    }
    if (exposure_patterns[j].empty()) {
      throw Error(ErrorCode::kConfig,
                  "CCS " + std::to_string(exposure_ccs[j]) +
                      " has no codes outside the cohort definitions");
    }
  }

  Rng rng(config.seed);
  std::vector<double> prevalence(d);
  for (double& p : prevalence) {
    p = rng.Uniform(config.prevalence_min, config.prevalence_max);
  }
  for (const XorTerm& term : config.xor_terms) {
    prevalence[static_cast<std::size_t>(term.first)] = 0.5;
    prevalence[static_cast<std::size_t>(term.second)] = 0.5;
  }
  // Centre the logit so the planted terms do not shift the base rate.
  double intercept = Logit(config.base_rate);
  for (std::size_t j = 0; j < d; ++j) {
    intercept -= config.planted_weights[j] * prevalence[j];
  }
  for (const XorTerm& term : config.xor_terms) intercept -= 0.5 * term.weight;

  std::vector<PatientRecord> patients;
  patients.reserve(static_cast<std::size_t>(config.n_patients));
  for (int n = 0; n < config.n_patients; ++n) {
    enum class Violation { kNone, kAge, kVisits, kEnrollment, kT1d, kCkd };
    Violation violation = Violation::kNone;
    {
      double u = rng.Uniform();
      const std::pair<double, Violation> table[] = {
          {config.violate_age, Violation::kAge},
          {config.violate_visits, Violation::kVisits},
          {config.violate_enrollment, Violation::kEnrollment},
          {config.violate_t1d, Violation::kT1d},
          {config.violate_prevalent_ckd, Violation::kCkd}};
      for (const auto& [fraction, kind] : table) {
        if (u < fraction) {
          violation = kind;
          break;
        }
        u -= fraction;
      }
    }

    char id[32];
    std::snprintf(id, sizeof(id), "P%06d", n + 1);
    PatientRecord p;
    p.patient_id = id;

    const int index_day = static_cast<int>(rng.Between(730, 1400));
    int age = static_cast<int>(rng.Between(19, 64));
    if (violation == Violation::kAge) {
      age = rng.Bernoulli(0.5) ? static_cast<int>(rng.Between(65, 80))
                               : static_cast<int>(rng.Between(12, 18));
    }
    p.birth_year = YearOfDay(index_day, config.epoch_year) - age;
    p.sex = rng.Bernoulli(0.5) ? Sex::kFemale : Sex::kMale;
    p.enrollment_start =
        violation == Violation::kEnrollment
            ? static_cast<int>(rng.Between(index_day - 300, index_day - 1))
            : static_cast<int>(rng.Between(index_day - 730, index_day - 365));

    std::vector<int> exposed(d, 0);
    double logit = intercept;
    for (std::size_t j = 0; j < d; ++j) {
      exposed[j] = rng.Bernoulli(prevalence[j]) ? 1 : 0;
      logit += config.planted_weights[j] * exposed[j];
    }
    for (const XorTerm& term : config.xor_terms) {
      logit += term.weight * (exposed[static_cast<std::size_t>(term.first)] ^
                              exposed[static_cast<std::size_t>(term.second)]);
    }
    const int outcome = rng.Bernoulli(Sigmoid(logit)) ? 1 : 0;

    std::map<int, std::vector<std::string>> by_day;
    auto add = [&](int day, std::string code) {
      by_day[day].push_back(std::move(code));
    };
    add(index_day, Pick(rng, kT2dmCodes));
    if (violation != Violation::kVisits) {
      add(index_day + static_cast<int>(rng.Between(14, 180)),
          Pick(rng, kT2dmCodes));
    }
    const int history_start = std::max(p.enrollment_start, index_day - 330);
    for (std::size_t j = 0; j < d; ++j) {
      if (!exposed[j]) continue;
      const auto& patterns = exposure_patterns[j];
      add(static_cast<int>(rng.Between(history_start, index_day - 1)),
          patterns[rng.Below(patterns.size())].Instantiate());
    }
    if (violation == Violation::kT1d) {
      const int t2dm_visits = 2;
      const int t1d_visits = t2dm_visits + static_cast<int>(rng.Between(0, 1));
      for (int k = 0; k < t1d_visits; ++k) {
        add(static_cast<int>(rng.Between(history_start, index_day + 300)),
            Pick(rng, kT1dCodes));
      }
    }
    if (violation == Violation::kCkd) {
      add(static_cast<int>(rng.Between(history_start, index_day)),
          Pick(rng, kCkdCodes));
    }
    if (outcome) {
      add(index_day + static_cast<int>(rng.Between(1, config.horizon_days)),
          Pick(rng, kCkdCodes));
    } else if (rng.Bernoulli(0.25)) {
      add(index_day + static_cast<int>(rng.Between(config.horizon_days + 1,
                                                   config.horizon_days + 360)),
          Pick(rng, kCkdCodes));
    }
    // Post-index encounters never reach the feature window.
    const int noise_visits = static_cast<int>(rng.Between(0, 2));
    for (int k = 0; k < noise_visits; ++k) {
      const auto& patterns = exposure_patterns[rng.Below(d)];
      add(index_day + static_cast<int>(rng.Between(1, 300)),
          patterns[rng.Below(patterns.size())].Instantiate());
    }

    for (auto& [day, codes] : by_day) {
      std::sort(codes.begin(), codes.end());
      codes.erase(std::unique(codes.begin(), codes.end()), codes.end());
      p.visits.push_back({day, std::move(codes)});
    }
    p.enrollment_end =
        p.visits.back().date + static_cast<int>(rng.Between(0, 90));
    patients.push_back(std::move(p));
  }
  return patients;
}

Json ToJson(const SynthConfig& c) {
  Json xor_terms = Json::array();
  for (const XorTerm& t : c.xor_terms) {
    xor_terms.push_back(
        {{"first", t.first}, {"second", t.second}, {"weight", t.weight}});
  }
  return {{"n_patients", c.n_patients},
          {"n_ccs_features", c.n_ccs_features},
          {"seed", c.seed},
          {"planted_weights", c.planted_weights},
          {"xor_terms", std::move(xor_terms)},
          {"base_rate", c.base_rate},
          {"prevalence_min", c.prevalence_min},
          {"prevalence_max", c.prevalence_max},
          {"violate_age", c.violate_age},
          {"violate_visits", c.violate_visits},
          {"violate_enrollment", c.violate_enrollment},
          {"violate_t1d", c.violate_t1d},
          {"violate_prevalent_ckd", c.violate_prevalent_ckd},
          {"reserved_ccs", c.reserved_ccs},
          {"horizon_days", c.horizon_days},
          {"epoch_year", c.epoch_year}};
}

SynthConfig SynthConfigFromJson(const Json& json) {
  SynthConfig c;
  if (json.is_null()) {
    c.planted_weights = DefaultPlantedWeights(c.n_ccs_features, c.seed);
    return c;
  }
  const std::string path = "/synth";
  RejectUnknownFields(
      json,
      {"n_patients", "n_ccs_features", "seed", "planted_weights", "xor_terms",
       "base_rate", "prevalence_min", "prevalence_max", "violate_age",
       "violate_visits", "violate_enrollment", "violate_t1d",
       "violate_prevalent_ckd", "reserved_ccs", "horizon_days", "epoch_year"},
      path);
  if (json.contains("n_patients")) {
    c.n_patients = static_cast<int>(RequireInt(json, "n_patients", path));
  }
  if (json.contains("n_ccs_features")) {
    c.n_ccs_features =
        static_cast<int>(RequireInt(json, "n_ccs_features", path));
  }
  if (json.contains("seed")) {
    c.seed = static_cast<std::uint64_t>(RequireInt(json, "seed", path));
  }
  if (json.contains("planted_weights")) {
    c.planted_weights = json.at("planted_weights").get<std::vector<double>>();
  } else {
    c.planted_weights = DefaultPlantedWeights(c.n_ccs_features, c.seed);
  }
  if (json.contains("xor_terms")) {
    const Json& terms = RequireArray(json, "xor_terms", path);
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const std::string tpath = path + "/xor_terms/" + std::to_string(i);
      c.xor_terms.push_back(
          {static_cast<int>(RequireInt(terms[i], "first", tpath)),
           static_cast<int>(RequireInt(terms[i], "second", tpath)),
           RequireNumber(terms[i], "weight", tpath)});
    }
  }
  auto real = [&](const char* key, double& out) {
    if (json.contains(key)) out = RequireNumber(json, key, path);
  };
  real("base_rate", c.base_rate);
  real("prevalence_min", c.prevalence_min);
  real("prevalence_max", c.prevalence_max);
  real("violate_age", c.violate_age);
  real("violate_visits", c.violate_visits);
  real("violate_enrollment", c.violate_enrollment);
  real("violate_t1d", c.violate_t1d);
  real("violate_prevalent_ckd", c.violate_prevalent_ckd);
  if (json.contains("reserved_ccs")) {
    c.reserved_ccs = json.at("reserved_ccs").get<std::vector<int>>();
  }
  if (json.contains("horizon_days")) {
    c.horizon_days = static_cast<int>(RequireInt(json, "horizon_days", path));
  }
  if (json.contains("epoch_year")) {
    c.epoch_year = static_cast<int>(RequireInt(json, "epoch_year", path));
  }
  return c;
}

}  // namespace ckdctx::cohort
