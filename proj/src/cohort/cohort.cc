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

#include "ckdctx/cohort/cohort.h"

namespace ckdctx::cohort {

std::string_view ExclusionReasonName(ExclusionReason reason) {
  switch (reason) {
    case ExclusionReason::kInsufficientVisits: return "insufficient-visits";
    case ExclusionReason::kNotContinuouslyEnrolled: return "not-enrolled";
    case ExclusionReason::kT1dDominant: return "t1d-dominant";
    case ExclusionReason::kAgeOutOfRange: return "age-out-of-range";
    case ExclusionReason::kPrevalentCkd: return "prevalent-ckd";
  }
  return "unknown";
}

Json Cohort::AuditJson() const {
  Json counts = Json::object();
  int excluded_total = 0;
  for (int i = 0; i < kExclusionReasonCount; ++i) {
    counts[std::string(ExclusionReasonName(static_cast<ExclusionReason>(i)))] =
        exclusions[i];
    excluded_total += exclusions[i];
  }
  return {{"included", members.size()},
          {"excluded", excluded_total},
          {"exclusions", std::move(counts)}};
}

std::optional<ExclusionReason> CheckEligibility(const PatientRecord& patient,
                                                const CohortConfig& config,
                                                int* index_date) {
  int t2dm_visits = 0;
  int t1d_visits = 0;
  int first_t2dm = -1;
  for (const Visit& visit : patient.visits) {
    if (config.t2dm_codes.MatchesAny(visit.codes)) {
      if (first_t2dm < 0) first_t2dm = visit.date;
      ++t2dm_visits;
    }
    if (config.t1d_codes.MatchesAny(visit.codes)) ++t1d_visits;
  }
  if (index_date != nullptr) *index_date = first_t2dm;

  if (t2dm_visits < config.min_t2dm_visits) {
    return ExclusionReason::kInsufficientVisits;
  }
  if (patient.enrollment_start > first_t2dm - config.pre_enrollment_days) {
    return ExclusionReason::kNotContinuouslyEnrolled;
  }
  if (t2dm_visits <= t1d_visits) return ExclusionReason::kT1dDominant;
  const int age = YearOfDay(first_t2dm, config.epoch_year) - patient.birth_year;
  if (age < config.age_min || age > config.age_max) {
    return ExclusionReason::kAgeOutOfRange;
  }
  for (const Visit& visit : patient.visits) {
    if (visit.date > first_t2dm) break;
    if (config.ckd_codes.MatchesAny(visit.codes)) {
      return ExclusionReason::kPrevalentCkd;
    }
  }
  return std::nullopt;
}

Cohort SelectCohort(const std::vector<PatientRecord>& patients,
                    const CohortConfig& config) {
  config.Validate();
  Cohort cohort;
  for (const PatientRecord& patient : patients) {
    int index_date = -1;
    auto reason = CheckEligibility(patient, config, &index_date);
    if (reason) {
      ++cohort.exclusions[static_cast<int>(*reason)];
    } else {
      cohort.members.push_back({patient, index_date});
    }
  }
  return cohort;
}

int LabelOutcome(const PatientRecord& patient, int index_date,
                 const CohortConfig& config) {
  for (const Visit& visit : patient.visits) {
    if (visit.date <= index_date) continue;
    if (visit.date > index_date + config.horizon_days) break;
    if (config.ckd_codes.MatchesAny(visit.codes)) return 1;
  }
  return 0;
}

}  // namespace ckdctx::cohort
