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

#include "ckdctx/risk/split.h"

#include <cmath>

#include "ckdctx/common/error.h"
#include "ckdctx/common/rng.h"

namespace ckdctx::risk {

Split SplitData(std::size_t n_rows, const SplitFractions& fractions,
                std::uint64_t seed) {
  const double sum = fractions.train + fractions.validation + fractions.test;
  if (fractions.train <= 0 || fractions.validation <= 0 ||
      fractions.test <= 0 || std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorCode::kSplit,
                "split fractions must be positive and sum to 1", "fractions");
  }
  if (n_rows < 10) {
    throw Error(ErrorCode::kSplit,
                "need at least 10 rows to split, got " + std::to_string(n_rows));
  }
  const double n = static_cast<double>(n_rows);
  const auto n_validation =
      static_cast<std::size_t>(std::llround(n * fractions.validation));
  const auto n_test = static_cast<std::size_t>(std::llround(n * fractions.test));
  if (n_validation == 0 || n_test == 0 || n_validation + n_test >= n_rows) {
    throw Error(ErrorCode::kSplit, "split of " + std::to_string(n_rows) +
                                       " rows leaves an empty partition");
  }
  Rng rng(seed);
  const std::vector<std::size_t> order = rng.Permutation(n_rows);
  const std::size_t n_train = n_rows - n_validation - n_test;

  Split split;
  split.fractions = fractions;
  split.seed = seed;
  split.train.assign(order.begin(), order.begin() + n_train);
  split.validation.assign(order.begin() + n_train,
                          order.begin() + n_train + n_validation);
  split.test.assign(order.begin() + n_train + n_validation, order.end());
  return split;
}

Json ToJson(const Split& split) {
  return {{"seed", split.seed},
          {"fractions",
           {split.fractions.train, split.fractions.validation,
            split.fractions.test}},
          {"train", split.train},
          {"validation", split.validation},
          {"test", split.test}};
}

Split SplitFromJson(const Json& json, std::size_t n_rows) {
  Split split;
  split.seed = static_cast<std::uint64_t>(RequireInt(json, "seed", ""));
  const Json& fractions = RequireArray(json, "fractions", "");
  if (fractions.size() != 3) {
    throw Error(ErrorCode::kValidation, "fractions must have 3 entries",
                "/fractions");
  }
  split.fractions = {fractions[0].get<double>(), fractions[1].get<double>(),
                     fractions[2].get<double>()};
  std::vector<char> seen(n_rows, 0);
  auto read = [&](const char* key) {
    std::vector<std::size_t> out;
    for (const Json& v : RequireArray(json, key, "")) {
      if (!v.is_number_unsigned() || v.get<std::size_t>() >= n_rows) {
        throw Error(ErrorCode::kSplit, "row index out of range",
                    std::string("/") + key);
      }
      const auto i = v.get<std::size_t>();
      if (seen[i]++) {
        throw Error(ErrorCode::kSplit,
                    "row " + std::to_string(i) + " is in two partitions",
                    std::string("/") + key);
      }
      out.push_back(i);
    }
    return out;
  };
  split.train = read("train");
  split.validation = read("validation");
  split.test = read("test");
  for (std::size_t i = 0; i < n_rows; ++i) {
    if (!seen[i]) {
      throw Error(ErrorCode::kSplit,
                  "row " + std::to_string(i) + " is in no partition");
    }
  }
  return split;
}

}  // namespace ckdctx::risk
