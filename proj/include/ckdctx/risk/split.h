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

#ifndef CKDCTX_RISK_SPLIT_H_
#define CKDCTX_RISK_SPLIT_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ckdctx/common/json_util.h"

namespace ckdctx::risk {

struct SplitFractions {
  double train = 0.70;
  double validation = 0.10;
  double test = 0.20;
};

// Disjoint row-index lists that together cover [0, n_rows).
struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
  SplitFractions fractions;
  std::uint64_t seed = 0;
};

// Validation and test sizes are round(n * f); train takes the remainder.
// Rows are assigned from a seeded permutation.
Split SplitData(std::size_t n_rows, const SplitFractions& fractions,
                std::uint64_t seed);

Json ToJson(const Split& split);
// Throws kSplit when the partitions overlap or leave gaps in [0, n_rows).
Split SplitFromJson(const Json& json, std::size_t n_rows);

}  // namespace ckdctx::risk

#endif  // CKDCTX_RISK_SPLIT_H_
