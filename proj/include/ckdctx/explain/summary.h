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

#ifndef CKDCTX_EXPLAIN_SUMMARY_H_
#define CKDCTX_EXPLAIN_SUMMARY_H_

#include <string>
#include <vector>

#include "ckdctx/cohort/ccs_map.h"
#include "ckdctx/common/json_util.h"

namespace ckdctx::explain {

struct SummaryRow {
  std::string label;
  int count = 0;

  friend bool operator==(const SummaryRow&, const SummaryRow&) = default;
};

// Baseline description of a prototype set: demographic rows followed by
// diagnosis counts rolled up to CCS Level-1 groups. Only integer counts are
// stored; percentages are derived when formatting.
struct PrototypeSummary {
  int n = 0;
  std::vector<SummaryRow> rows;
  int high_prevalence_percent = 50;

  bool IsHighPrevalence(const SummaryRow& row) const;
  // "15 (75.0)": count and 100 * count / n rounded half-up to one decimal.
  std::string FormatCount(const SummaryRow& row) const;
  // Aligned "Feature / Count (%)" table; `high_only` keeps just the
  // demographic rows and high-prevalence groups.
  std::string RenderText(bool high_only = false) const;

  friend bool operator==(const PrototypeSummary&,
                         const PrototypeSummary&) = default;
};

std::string FormatCountPercent(int count, int n);

PrototypeSummary SummarizePrototypes(
    const std::vector<std::vector<double>>& rows,
    const std::vector<std::string>& feature_names,
    const std::vector<int>& ccs_codes, const cohort::CcsMap& ccs_map,
    int high_prevalence_percent = 50);

Json ToJson(const PrototypeSummary& summary);
PrototypeSummary PrototypeSummaryFromJson(const Json& json);

}  // namespace ckdctx::explain

#endif  // CKDCTX_EXPLAIN_SUMMARY_H_
