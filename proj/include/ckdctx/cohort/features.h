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

#ifndef CKDCTX_COHORT_FEATURES_H_
#define CKDCTX_COHORT_FEATURES_H_

#include <string>
#include <vector>

#include "ckdctx/cohort/ccs_map.h"
#include "ckdctx/cohort/cohort.h"

namespace ckdctx::cohort {

inline constexpr const char* kAgeYoung = "AGE_GRP_Y";
inline constexpr const char* kAgeMiddle = "AGE_GRP_M";
inline constexpr const char* kAgeOld = "AGE_GRP_O";
inline constexpr const char* kSexFemale = "SEX_FEMALE";

struct FeatureConfig {
  // Indicators present in fewer than this fraction of rows are dropped.
  double min_prevalence = 0.005;
  // Presence/absence when true, visit counts otherwise.
  bool binarize = true;
  // Codes allowed to be absent from the CCS map; they are skipped.
  CodePatternSet ignore_codes;
  // Upper ages (inclusive) of the Y and M bins; older patients are O.
  int young_max_age = 44;
  int middle_max_age = 54;

  friend bool operator==(const FeatureConfig&, const FeatureConfig&) = default;
};

Json ToJson(const FeatureConfig& config);
FeatureConfig FeatureConfigFromJson(const Json& json);

// Name of the indicator column for a CCS category ("CCS_049").
std::string CcsFeatureName(int ccs);

struct FeatureMatrix {
  // CCS indicators sorted by code, then AGE_GRP_Y, AGE_GRP_M, AGE_GRP_O,
  // SEX_FEMALE.
  std::vector<std::string> feature_names;
  // CCS code of each leading indicator column.
  std::vector<int> ccs_codes;
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::vector<std::string> patient_ids;
  std::vector<int> index_dates;
  // Indicators removed by the prevalence filter.
  std::vector<std::string> dropped_features;

  std::size_t width() const { return feature_names.size(); }
  std::size_t size() const { return rows.size(); }
  // Row index of a patient, or -1.
  int FindPatient(const std::string& patient_id) const;
  int FeatureIndex(const std::string& name) const;

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;
};

FeatureMatrix BuildFeatures(const Cohort& cohort, const CcsMap& ccs_map,
                            const CohortConfig& cohort_config,
                            const FeatureConfig& config);

Json ToJson(const FeatureMatrix& matrix);
FeatureMatrix FeatureMatrixFromJson(const Json& json);

}  // namespace ckdctx::cohort

#endif  // CKDCTX_COHORT_FEATURES_H_
