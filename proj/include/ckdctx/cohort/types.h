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

#ifndef CKDCTX_COHORT_TYPES_H_
#define CKDCTX_COHORT_TYPES_H_

#include <string>
#include <string_view>
#include <vector>

#include "ckdctx/cohort/icd.h"
#include "ckdctx/common/json_util.h"

namespace ckdctx::cohort {

enum class Sex { kFemale, kMale };

struct Visit {
  int date = 0;  // days since the dataset epoch
  std::vector<std::string> codes;

  friend bool operator==(const Visit&, const Visit&) = default;
};

struct PatientRecord {
  std::string patient_id;
  int birth_year = 0;
  Sex sex = Sex::kFemale;
  int enrollment_start = 0;
  int enrollment_end = 0;
  std::vector<Visit> visits;  // ascending by date

  friend bool operator==(const PatientRecord&,
                         const PatientRecord&) = default;
};

// Throws kInput describing the first violated record invariant.
void ValidatePatient(const PatientRecord& patient);

struct CohortConfig {
  CodePatternSet t2dm_codes{"250.*0", "250.*2", "362.0", "E11.*"};
  CodePatternSet t1d_codes{"250.*1", "250.*3", "E10.*"};
  CodePatternSet ckd_codes{"N18.*", "585.*", "403.*"};
  int min_t2dm_visits = 2;
  int pre_enrollment_days = 365;
  int age_min = 19;
  int age_max = 64;
  int horizon_days = 360;
  // Calendar year of day index 0; the claims window opens on January 1.
  int epoch_year = 2013;

  void Validate() const;
  friend bool operator==(const CohortConfig&, const CohortConfig&) = default;
};

// Calendar year containing `day` (days since January 1 of epoch_year).
int YearOfDay(int day, int epoch_year);

Json ToJson(const PatientRecord& patient);
PatientRecord PatientFromJson(const Json& json, const std::string& path);

// Newline-delimited JSON, one record per line.
std::string WriteNdjson(const std::vector<PatientRecord>& patients);
std::vector<PatientRecord> ReadNdjson(std::string_view text);

Json ToJson(const CohortConfig& config);
// Missing keys keep their defaults; unknown keys are rejected.
CohortConfig CohortConfigFromJson(const Json& json);

}  // namespace ckdctx::cohort

#endif  // CKDCTX_COHORT_TYPES_H_
