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

#ifndef CKDCTX_EXPLAIN_PROTODASH_H_
#define CKDCTX_EXPLAIN_PROTODASH_H_

#include <span>
#include <vector>

#include "ckdctx/common/json_util.h"

namespace ckdctx::explain {

using Rows = std::vector<std::vector<double>>;

// k(a, b) = exp(-|a - b|^2 / (2 bandwidth^2)).
struct KernelSpec {
  double bandwidth = 1.0;

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

double RbfKernel(std::span<const double> a, std::span<const double> b,
                 double bandwidth);

// Median Euclidean distance over distinct pairs of `rows`; 1 when the rows
// are all identical. At most the first 1000 rows are used.
double MedianPairwiseDistance(const Rows& rows);

struct PrototypeSet {
  std::vector<std::size_t> indices;  // candidate rows, in selection order
  std::vector<double> weights;       // nonnegative, aligned with indices
  std::vector<double> objective_trace;
  KernelSpec kernel;
  // Largest violation of the optimality conditions of the final weights.
  double kkt_residual = 0.0;

  friend bool operator==(const PrototypeSet&, const PrototypeSet&) = default;
};

// Greedy prototype selection maximising
//   l(w) = w' mu - 1/2 w' K w,   w >= 0,
// where mu_j is the mean kernel similarity of candidate j to the target rows
// and K is the candidate Gram matrix. Each step adds the candidate with the
// largest positive gradient mu_j - (K w)_j and re-fits the weights on the
// selected support by projected gradient.
PrototypeSet ProtoDash(const Rows& candidates, const Rows& target,
                       std::size_t k, const KernelSpec& kernel);

Json ToJson(const PrototypeSet& set);
PrototypeSet PrototypeSetFromJson(const Json& json);

}  // namespace ckdctx::explain

#endif  // CKDCTX_EXPLAIN_PROTODASH_H_
