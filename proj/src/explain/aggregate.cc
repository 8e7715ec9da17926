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

#include "ckdctx/explain/aggregate.h"

#include <algorithm>
#include <cmath>

#include "ckdctx/common/error.h"

namespace ckdctx::explain {

std::vector<ImportanceEntry> AggregateImportance(
    const std::vector<Attribution>& attributions, std::size_t top_n) {
  if (attributions.empty()) return {};
  const std::vector<std::string>& names = attributions[0].feature_names;
  for (const Attribution& a : attributions) {
    if (a.feature_names != names || a.phi.size() != names.size() ||
        a.feature_values.size() != names.size()) {
      throw Error(ErrorCode::kInput,
                  "attributions disagree on the feature layout (patient '" +
                      a.patient_id + "')");
    }
  }
  std::vector<ImportanceEntry> entries(names.size());
  for (std::size_t j = 0; j < names.size(); ++j) {
    ImportanceEntry& e = entries[j];
    e.feature = names[j];
    std::vector<double> magnitudes;
    magnitudes.reserve(attributions.size());
    for (const Attribution& a : attributions) {
      e.spread.push_back({a.phi[j], a.feature_values[j] != 0.0});
      magnitudes.push_back(std::abs(a.phi[j]));
    }
    // Summing in sorted order keeps the mean independent of input order.
    std::sort(magnitudes.begin(), magnitudes.end());
    double total = 0.0;
    for (double m : magnitudes) total += m;
    e.mean_abs_phi = total / static_cast<double>(attributions.size());
    std::sort(e.spread.begin(), e.spread.end(),
              [](const SpreadPoint& a, const SpreadPoint& b) {
                if (a.phi != b.phi) return a.phi < b.phi;
                return a.present < b.present;
              });
  }
  std::sort(entries.begin(), entries.end(),
            [](const ImportanceEntry& a, const ImportanceEntry& b) {
              if (a.mean_abs_phi != b.mean_abs_phi) {
                return a.mean_abs_phi > b.mean_abs_phi;
              }
              return a.feature < b.feature;
            });
  if (entries.size() > top_n) entries.resize(top_n);
  return entries;
}

Json ToJson(const std::vector<ImportanceEntry>& ranking) {
  Json out = Json::array();
  for (const ImportanceEntry& e : ranking) {
    Json spread = Json::array();
    for (const SpreadPoint& p : e.spread) {
      spread.push_back({{"phi", p.phi}, {"present", p.present}});
    }
    out.push_back({{"feature", e.feature},
                   {"mean_abs_phi", e.mean_abs_phi},
                   {"spread", std::move(spread)}});
  }
  return out;
}

}  // namespace ckdctx::explain
