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

#include "ckdctx/explain/summary.h"

#include <algorithm>
#include <map>

#include "ckdctx/cohort/features.h"
#include "ckdctx/common/error.h"

namespace ckdctx::explain {
namespace {

constexpr const char* kCountLabel = "n";
constexpr const char* kSexLabel = "SEX - FEMALE";

bool IsDemographic(const std::string& label) {
  return label == cohort::kAgeMiddle || label == cohort::kAgeOld ||
         label == cohort::kAgeYoung || label == kSexLabel;
}

}  // namespace

std::string FormatCountPercent(int count, int n) {
  if (n <= 0) return std::to_string(count) + " (0.0)";
  // Tenths of a percent, rounded half up in integer arithmetic.
  const long long tenths =
      (2000LL * count + n) / (2LL * static_cast<long long>(n));
  return std::to_string(count) + " (" + std::to_string(tenths / 10) + "." +
         std::to_string(tenths % 10) + ")";
}

bool PrototypeSummary::IsHighPrevalence(const SummaryRow& row) const {
  return n > 0 && 100LL * row.count >=
                      static_cast<long long>(high_prevalence_percent) * n;
}

std::string PrototypeSummary::FormatCount(const SummaryRow& row) const {
  return FormatCountPercent(row.count, n);
}

std::string PrototypeSummary::RenderText(bool high_only) const {
  std::vector<std::pair<std::string, std::string>> lines;
  lines.emplace_back(kCountLabel, std::to_string(n));
  for (const SummaryRow& row : rows) {
    if (high_only && !IsDemographic(row.label) && !IsHighPrevalence(row)) {
      continue;
    }
    lines.emplace_back(row.label, FormatCount(row));
  }
  std::size_t width = std::string("Feature").size();
  for (const auto& [label, value] : lines) width = std::max(width, label.size());
  std::string out;
  auto append = [&](const std::string& label, const std::string& value) {
    out += label;
    out.append(width - label.size(), ' ');
    out += " | " + value + "\n";
  };
  append("Feature", "Count (%)");
  out += std::string(width, '-') + "-+-" + std::string(9, '-') + "\n";
  for (const auto& [label, value] : lines) append(label, value);
  return out;
}

PrototypeSummary SummarizePrototypes(
    const std::vector<std::vector<double>>& rows,
    const std::vector<std::string>& feature_names,
    const std::vector<int>& ccs_codes, const cohort::CcsMap& ccs_map,
    int high_prevalence_percent) {
  if (high_prevalence_percent < 0 || high_prevalence_percent > 100) {
    throw Error(ErrorCode::kConfig, "high-prevalence cutoff must be a "
                                    "percentage", "high_prevalence_percent");
  }
  if (ccs_codes.size() > feature_names.size()) {
    throw Error(ErrorCode::kShape, "more CCS codes than feature columns");
  }
  for (const auto& row : rows) {
    if (row.size() != feature_names.size()) {
      throw Error(ErrorCode::kShape, "prototype row width does not match the "
                                     "feature names");
    }
  }
  PrototypeSummary summary;
  summary.n = static_cast<int>(rows.size());
  summary.high_prevalence_percent = high_prevalence_percent;

  auto column = [&](const char* name) {
    const auto it =
        std::find(feature_names.begin(), feature_names.end(), name);
    return it == feature_names.end()
               ? -1
               : static_cast<int>(it - feature_names.begin());
  };
  auto count_column = [&](int j) {
    int count = 0;
    if (j < 0) return count;
    for (const auto& row : rows) count += row[j] != 0.0 ? 1 : 0;
    return count;
  };
  summary.rows.push_back(
      {cohort::kAgeMiddle, count_column(column(cohort::kAgeMiddle))});
  summary.rows.push_back(
      {cohort::kAgeOld, count_column(column(cohort::kAgeOld))});
  summary.rows.push_back(
      {cohort::kAgeYoung, count_column(column(cohort::kAgeYoung))});
  summary.rows.push_back(
      {kSexLabel, count_column(column(cohort::kSexFemale))});

  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t j = 0; j < ccs_codes.size(); ++j) {
    groups[ccs_map.Level1(ccs_codes[j])].push_back(j);
  }
  for (const auto& [label, columns] : groups) {
    int count = 0;
    for (const auto& row : rows) {
      const bool any = std::any_of(columns.begin(), columns.end(),
                                   [&](std::size_t j) { return row[j] != 0.0; });
      count += any ? 1 : 0;
    }
    summary.rows.push_back({label, count});
  }
  return summary;
}

Json ToJson(const PrototypeSummary& summary) {
  Json rows = Json::array();
  for (const SummaryRow& row : summary.rows) {
    rows.push_back({{"label", row.label},
                    {"count", row.count},
                    {"high_prevalence", summary.IsHighPrevalence(row)}});
  }
  return {{"n", summary.n},
          {"high_prevalence_percent", summary.high_prevalence_percent},
          {"rows", std::move(rows)}};
}

PrototypeSummary PrototypeSummaryFromJson(const Json& json) {
  const std::string path = "/summary";
  PrototypeSummary summary;
  summary.n = static_cast<int>(RequireInt(json, "n", path));
  summary.high_prevalence_percent =
      static_cast<int>(RequireInt(json, "high_prevalence_percent", path));
  const Json& rows = RequireArray(json, "rows", path);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string row_path = path + "/rows/" + std::to_string(i);
    summary.rows.push_back(
        {RequireString(rows[i], "label", row_path),
         static_cast<int>(RequireInt(rows[i], "count", row_path))});
  }
  return summary;
}

}  // namespace ckdctx::explain
