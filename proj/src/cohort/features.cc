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

#include "ckdctx/cohort/features.h"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

#include "ckdctx/common/error.h"

namespace ckdctx::cohort {

std::string CcsFeatureName(int ccs) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "CCS_%03d", ccs);
  return buf;
}

int FeatureMatrix::FindPatient(const std::string& patient_id) const {
  for (std::size_t i = 0; i < patient_ids.size(); ++i) {
    if (patient_ids[i] == patient_id) return static_cast<int>(i);
  }
  return -1;
}

int FeatureMatrix::FeatureIndex(const std::string& name) const {
  for (std::size_t i = 0; i < feature_names.size(); ++i) {
    if (feature_names[i] == name) return static_cast<int>(i);
  }
  return -1;
}

FeatureMatrix BuildFeatures(const Cohort& cohort, const CcsMap& ccs_map,
                            const CohortConfig& cohort_config,
                            const FeatureConfig& config) {
  // Per-patient CCS counts over the feature window (date <= index_date).
  std::vector<std::map<int, int>> counts(cohort.members.size());
  std::set<int> seen;
  for (std::size_t i = 0; i < cohort.members.size(); ++i) {
    const CohortMember& m = cohort.members[i];
    for (const Visit& visit : m.patient.visits) {
      if (visit.date > m.index_date) break;
      std::set<int> in_visit;
      for (const std::string& code : visit.codes) {
        auto ccs = ccs_map.Lookup(code);
        if (!ccs) {
          if (config.ignore_codes.Matches(code)) continue;
          throw Error(ErrorCode::kMapping,
                      "diagnosis code '" + code + "' of patient " +
                          m.patient.patient_id + " has no CCS mapping",
                      code);
        }
        in_visit.insert(*ccs);
      }
      for (int ccs : in_visit) {
        ++counts[i][ccs];
        seen.insert(ccs);
      }
    }
  }

  FeatureMatrix out;
  const double n = static_cast<double>(cohort.members.size());
  for (int ccs : seen) {
    int present = 0;
    for (const auto& c : counts) present += c.count(ccs) ? 1 : 0;
    if (n > 0 && present / n < config.min_prevalence) {
      out.dropped_features.push_back(CcsFeatureName(ccs));
      continue;
    }
    out.ccs_codes.push_back(ccs);
    out.feature_names.push_back(CcsFeatureName(ccs));
  }
  const std::size_t n_ccs = out.ccs_codes.size();
  out.feature_names.insert(out.feature_names.end(),
                           {kAgeYoung, kAgeMiddle, kAgeOld, kSexFemale});

  for (std::size_t i = 0; i < cohort.members.size(); ++i) {
    const CohortMember& m = cohort.members[i];
    std::vector<double> row(out.feature_names.size(), 0.0);
    for (std::size_t j = 0; j < n_ccs; ++j) {
      auto it = counts[i].find(out.ccs_codes[j]);
      if (it == counts[i].end()) continue;
      row[j] = config.binarize ? 1.0 : static_cast<double>(it->second);
    }
    const int age = YearOfDay(m.index_date, cohort_config.epoch_year) -
                    m.patient.birth_year;
    const std::size_t age_col = age <= config.young_max_age    ? 0
                                : age <= config.middle_max_age ? 1
                                                               : 2;
    row[n_ccs + age_col] = 1.0;
    row[n_ccs + 3] = m.patient.sex == Sex::kFemale ? 1.0 : 0.0;
    out.rows.push_back(std::move(row));
    out.labels.push_back(LabelOutcome(m.patient, m.index_date, cohort_config));
    out.patient_ids.push_back(m.patient.patient_id);
    out.index_dates.push_back(m.index_date);
  }
  return out;
}

Json ToJson(const FeatureConfig& c) {
  return {{"min_prevalence", c.min_prevalence},
          {"binarize", c.binarize},
          {"ignore_codes", c.ignore_codes.Texts()},
          {"young_max_age", c.young_max_age},
          {"middle_max_age", c.middle_max_age}};
}

FeatureConfig FeatureConfigFromJson(const Json& json) {
  FeatureConfig c;
  if (json.is_null()) return c;
  const std::string path = "/features";
  RejectUnknownFields(json,
                      {"min_prevalence", "binarize", "ignore_codes",
                       "young_max_age", "middle_max_age"},
                      path);
  if (json.contains("min_prevalence")) {
    c.min_prevalence = RequireNumber(json, "min_prevalence", path);
  }
  if (json.contains("binarize")) c.binarize = json.at("binarize").get<bool>();
  if (json.contains("ignore_codes")) {
    c.ignore_codes =
        CodePatternSet(json.at("ignore_codes").get<std::vector<std::string>>());
  }
  if (json.contains("young_max_age")) {
    c.young_max_age = static_cast<int>(RequireInt(json, "young_max_age", path));
  }
  if (json.contains("middle_max_age")) {
    c.middle_max_age =
        static_cast<int>(RequireInt(json, "middle_max_age", path));
  }
  return c;
}

Json ToJson(const FeatureMatrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    rows.push_back({{"patient_id", m.patient_ids[i]},
                    {"index_date", m.index_dates[i]},
                    {"label", m.labels[i]},
                    {"x", m.rows[i]}});
  }
  return {{"format_version", 1},
          {"feature_names", m.feature_names},
          {"ccs_codes", m.ccs_codes},
          {"dropped_features", m.dropped_features},
          {"rows", std::move(rows)}};
}

FeatureMatrix FeatureMatrixFromJson(const Json& json) {
  const std::string path = "";
  if (RequireInt(json, "format_version", path) != 1) {
    throw Error(ErrorCode::kUnsupportedVersion,
                "unsupported feature matrix version", "/format_version");
  }
  FeatureMatrix m;
  m.feature_names =
      RequireArray(json, "feature_names", path).get<std::vector<std::string>>();
  m.ccs_codes = RequireArray(json, "ccs_codes", path).get<std::vector<int>>();
  m.dropped_features = RequireArray(json, "dropped_features", path)
                           .get<std::vector<std::string>>();
  const Json& rows = RequireArray(json, "rows", path);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string rpath = "/rows/" + std::to_string(i);
    m.patient_ids.push_back(RequireString(rows[i], "patient_id", rpath));
    m.index_dates.push_back(
        static_cast<int>(RequireInt(rows[i], "index_date", rpath)));
    m.labels.push_back(static_cast<int>(RequireInt(rows[i], "label", rpath)));
    auto x = RequireArray(rows[i], "x", rpath).get<std::vector<double>>();
    if (x.size() != m.feature_names.size()) {
      throw Error(ErrorCode::kShape, "row width mismatch", rpath + "/x");
    }
    m.rows.push_back(std::move(x));
  }
  return m;
}

}  // namespace ckdctx::cohort
