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

#ifndef CKDCTX_COHORT_COHORT_H_
#define CKDCTX_COHORT_COHORT_H_

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "ckdctx/cohort/types.h"

namespace ckdctx::cohort {

// Inclusion criteria in evaluation order. A rejected patient is charged to
// the first criterion it fails, so the counts sum to |input| - |cohort|.
enum class ExclusionReason {
  kInsufficientVisits,
  kNotContinuouslyEnrolled,
  kT1dDominant,
  kAgeOutOfRange,
  kPrevalentCkd,
};
inline constexpr int kExclusionReasonCount = 5;

std::string_view ExclusionReasonName(ExclusionReason reason);

struct CohortMember {
  PatientRecord patient;
  int index_date = 0;  // first T2DM-coded visit

  friend bool operator==(const CohortMember&, const CohortMember&) = default;
};

struct Cohort {
  std::vector<CohortMember> members;
  std::array<int, kExclusionReasonCount> exclusions{};

  int excluded(ExclusionReason reason) const {
    return exclusions[static_cast<int>(reason)];
  }
  Json AuditJson() const;
};

// Returns nullopt if the patient qualifies, otherwise the first failed
// criterion. `index_date` receives the first T2DM visit date when one exists.
std::optional<ExclusionReason> CheckEligibility(const PatientRecord& patient,
                                                const CohortConfig& config,
                                                int* index_date = nullptr);

Cohort SelectCohort(const std::vector<PatientRecord>& patients,
                    const CohortConfig& config);

// 1 iff a CKD-coded visit falls in (index_date, index_date + horizon_days].
int LabelOutcome(const PatientRecord& patient, int index_date,
                 const CohortConfig& config);

}  // namespace ckdctx::cohort

#endif  // CKDCTX_COHORT_COHORT_H_
