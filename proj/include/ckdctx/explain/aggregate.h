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

#ifndef CKDCTX_EXPLAIN_AGGREGATE_H_
#define CKDCTX_EXPLAIN_AGGREGATE_H_

#include <string>
#include <vector>

#include "ckdctx/common/json_util.h"
#include "ckdctx/explain/shapley.h"

namespace ckdctx::explain {

struct SpreadPoint {
  double phi = 0.0;
  bool present = false;  // feature value non-zero for that patient

  friend bool operator==(const SpreadPoint&, const SpreadPoint&) = default;
};

struct ImportanceEntry {
  std::string feature;
  double mean_abs_phi = 0.0;
  std::vector<SpreadPoint> spread;  // sorted by (phi, present)

  friend bool operator==(const ImportanceEntry&,
                         const ImportanceEntry&) = default;
};

// Ranks features by mean |phi| (descending, ties by feature name). Returns
// at most top_n entries. Throws kInput when feature orderings differ.
std::vector<ImportanceEntry> AggregateImportance(
    const std::vector<Attribution>& attributions, std::size_t top_n = 20);

Json ToJson(const std::vector<ImportanceEntry>& ranking);

}  // namespace ckdctx::explain

#endif  // CKDCTX_EXPLAIN_AGGREGATE_H_
