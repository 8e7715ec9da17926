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

#include "ckdctx/cohort/types.h"

#include <chrono>

#include "ckdctx/common/error.h"

namespace ckdctx::cohort {

void ValidatePatient(const PatientRecord& patient) {
  const std::string& id = patient.patient_id;
  if (id.empty()) throw Error(ErrorCode::kInput, "patient_id is empty");
  if (patient.enrollment_start > patient.enrollment_end) {
    throw Error(ErrorCode::kInput,
                id + ": enrollment_start is after enrollment_end");
  }
  int previous = -1;
  for (const Visit& visit : patient.visits) {
    if (visit.date < 0) {
      throw Error(ErrorCode::kInput, id + ": negative visit date");
    }
    if (visit.date < previous) {
      throw Error(ErrorCode::kInput, id + ": visits are not sorted by date");
    }
    if (visit.date < patient.enrollment_start ||
        visit.date > patient.enrollment_end) {
      throw Error(ErrorCode::kInput,
                  id + ": visit on day " + std::to_string(visit.date) +
                      " falls outside enrollment");
    }
    if (visit.codes.empty()) {
      throw Error(ErrorCode::kInput, id + ": visit without diagnosis codes");
    }
    for (const auto& code : visit.codes) {
      if (!IsValidIcdCode(code)) {
        throw Error(ErrorCode::kInput, id + ": malformed ICD code '" + code +
                                           "'");
      }
    }
    previous = visit.date;
  }
}

void CohortConfig::Validate() const {
  if (horizon_days <= 0) {
    throw Error(ErrorCode::kConfig, "horizon_days must be positive",
                "horizon_days");
  }
  if (age_min >= age_max) {
    throw Error(ErrorCode::kConfig, "age_min must be below age_max", "age_min");
  }
  if (min_t2dm_visits < 1) {
    throw Error(ErrorCode::kConfig, "min_t2dm_visits must be at least 1",
                "min_t2dm_visits");
  }
  if (pre_enrollment_days < 0) {
    throw Error(ErrorCode::kConfig, "pre_enrollment_days must be >= 0",
                "pre_enrollment_days");
  }
}

int YearOfDay(int day, int epoch_year) {
  using namespace std::chrono;
  const sys_days epoch{year{epoch_year} / January / 1};
  const year_month_day ymd{epoch + days{day}};
  return static_cast<int>(ymd.year());
}

Json ToJson(const PatientRecord& patient) {
  Json visits = Json::array();
  for (const Visit& v : patient.visits) {
    visits.push_back({{"date", v.date}, {"codes", v.codes}});
  }
  return {{"patient_id", patient.patient_id},
          {"birth_year", patient.birth_year},
          {"sex", patient.sex == Sex::kFemale ? "F" : "M"},
          {"enrollment_start", patient.enrollment_start},
          {"enrollment_end", patient.enrollment_end},
          {"visits", std::move(visits)}};
}

PatientRecord PatientFromJson(const Json& json, const std::string& path) {
  PatientRecord p;
  p.patient_id = RequireString(json, "patient_id", path);
  p.birth_year = static_cast<int>(RequireInt(json, "birth_year", path));
  const std::string sex = RequireString(json, "sex", path);
  if (sex == "F") {
    p.sex = Sex::kFemale;
  } else if (sex == "M") {
    p.sex = Sex::kMale;
  } else {
    throw Error(ErrorCode::kValidation, "sex must be F or M", path + "/sex");
  }
  p.enrollment_start =
      static_cast<int>(RequireInt(json, "enrollment_start", path));
  p.enrollment_end = static_cast<int>(RequireInt(json, "enrollment_end", path));
  const Json& visits = RequireArray(json, "visits", path);
  for (std::size_t i = 0; i < visits.size(); ++i) {
    const std::string vpath = path + "/visits/" + std::to_string(i);
    Visit v;
    v.date = static_cast<int>(RequireInt(visits[i], "date", vpath));
    for (const Json& c : RequireArray(visits[i], "codes", vpath)) {
      if (!c.is_string()) {
        throw Error(ErrorCode::kValidation, "codes must be strings",
                    vpath + "/codes");
      }
      v.codes.push_back(c.get<std::string>());
    }
    p.visits.push_back(std::move(v));
  }
  return p;
}

std::string WriteNdjson(const std::vector<PatientRecord>& patients) {
  std::string out;
  for (const auto& p : patients) {
    out += ToJson(p).dump();
    out.push_back('\n');
  }
  return out;
}

std::vector<PatientRecord> ReadNdjson(std::string_view text) {
  std::vector<PatientRecord> patients;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const Json json = ParseJson(line, "line " + std::to_string(line_no));
    PatientRecord p = PatientFromJson(json, "line " + std::to_string(line_no));
    ValidatePatient(p);
    patients.push_back(std::move(p));
  }
  return patients;
}

Json ToJson(const CohortConfig& c) {
  return {{"t2dm_codes", c.t2dm_codes.Texts()},
          {"t1d_codes", c.t1d_codes.Texts()},
          {"ckd_codes", c.ckd_codes.Texts()},
          {"min_t2dm_visits", c.min_t2dm_visits},
          {"pre_enrollment_days", c.pre_enrollment_days},
          {"age_min", c.age_min},
          {"age_max", c.age_max},
          {"horizon_days", c.horizon_days},
          {"epoch_year", c.epoch_year}};
}

CohortConfig CohortConfigFromJson(const Json& json) {
  CohortConfig c;
  if (json.is_null()) return c;
  const std::string path = "/cohort";
  RejectUnknownFields(json,
                      {"t2dm_codes", "t1d_codes", "ckd_codes",
                       "min_t2dm_visits", "pre_enrollment_days", "age_min",
                       "age_max", "horizon_days", "epoch_year"},
                      path);
  auto patterns = [&](const char* key, CodePatternSet& out) {
    if (json.contains(key)) {
      out = CodePatternSet(json.at(key).get<std::vector<std::string>>());
    }
  };
  patterns("t2dm_codes", c.t2dm_codes);
  patterns("t1d_codes", c.t1d_codes);
  patterns("ckd_codes", c.ckd_codes);
  auto integer = [&](const char* key, int& out) {
    if (json.contains(key)) out = static_cast<int>(RequireInt(json, key, path));
  };
  integer("min_t2dm_visits", c.min_t2dm_visits);
  integer("pre_enrollment_days", c.pre_enrollment_days);
  integer("age_min", c.age_min);
  integer("age_max", c.age_max);
  integer("horizon_days", c.horizon_days);
  integer("epoch_year", c.epoch_year);
  c.Validate();
  return c;
}

}  // namespace ckdctx::cohort
