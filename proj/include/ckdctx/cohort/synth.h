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

#ifndef CKDCTX_COHORT_SYNTH_H_
#define CKDCTX_COHORT_SYNTH_H_

#include <cstdint>
#include <vector>

#include "ckdctx/cohort/ccs_map.h"
#include "ckdctx/cohort/types.h"

namespace ckdctx::cohort {

// Adds weight * (x_first XOR x_second) to the outcome logit.
struct XorTerm {
  int first = 0;
  int second = 0;
  double weight = 0.0;

  friend bool operator==(const XorTerm&, const XorTerm&) = default;
};

// Synthetic claims with a planted outcome model. Exposure j is present
// before the index date with its own prevalence; the CKD outcome is drawn
// from sigmoid(logit(base_rate) + sum_j w_j x_j + xor terms).
struct SynthConfig {
  int n_patients = 2000;
  int n_ccs_features = 30;
  std::uint64_t seed = 7;
  std::vector<double> planted_weights;  // length n_ccs_features
  std::vector<XorTerm> xor_terms;
  double base_rate = 0.15;
  // Exposure prevalences are drawn uniformly from this range; features that
  // take part in an XOR term use 0.5 so the interaction is balanced.
  double prevalence_min = 0.05;
  double prevalence_max = 0.40;
  // Probability that a patient is generated to fail each criterion.
  double violate_age = 0.04;
  double violate_visits = 0.04;
  double violate_enrollment = 0.04;
  double violate_t1d = 0.03;
  double violate_prevalent_ckd = 0.03;
  // CCS categories never used as planted exposures (diabetes, CKD).
  std::vector<int> reserved_ccs{49, 50, 158};
  int horizon_days = 360;
  int epoch_year = 2013;

  void Validate() const;

  friend bool operator==(const SynthConfig&, const SynthConfig&) = default;
};

// Planted weights used when a configuration does not list them: a mix of
// strong risk factors, protective factors and noise features.
std::vector<double> DefaultPlantedWeights(int n_features, std::uint64_t seed);

// The CCS categories used as exposures, in feature order.
std::vector<int> ExposureCcs(const SynthConfig& config, const CcsMap& ccs_map);

std::vector<PatientRecord> GenerateClaims(const SynthConfig& config,
                                          const CcsMap& ccs_map);

Json ToJson(const SynthConfig& config);
SynthConfig SynthConfigFromJson(const Json& json);

}  // namespace ckdctx::cohort

#endif  // CKDCTX_COHORT_SYNTH_H_
