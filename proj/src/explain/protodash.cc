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

#include "ckdctx/explain/protodash.h"

#include <algorithm>
#include <cmath>

#include "ckdctx/common/error.h"

namespace ckdctx::explain {
namespace {

constexpr double kTolerance = 1e-8;
constexpr int kMaxIterations = 2000;
constexpr std::size_t kMaxBandwidthRows = 1000;

double Objective(std::span<const double> w, std::span<const double> mu,
                 const Rows& gram) {
  double linear = 0.0;
  double quad = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    linear += w[i] * mu[i];
    for (std::size_t j = 0; j < w.size(); ++j) {
      quad += w[i] * gram[i][j] * w[j];
    }
  }
  return linear - 0.5 * quad;
}

std::vector<double> Gradient(std::span<const double> w,
                             std::span<const double> mu, const Rows& gram) {
  std::vector<double> g(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    double kw = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) kw += gram[i][j] * w[j];
    g[i] = mu[i] - kw;
  }
  return g;
}

// For the maximisation over w >= 0: zero gradient where w > 0, nonpositive
// gradient where w = 0.
double KktResidual(std::span<const double> w, std::span<const double> mu,
                   const Rows& gram) {
  const std::vector<double> g = Gradient(w, mu, gram);
  double r = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    r = std::max(r, w[i] > 0.0 ? std::abs(g[i]) : std::max(g[i], 0.0));
  }
  return r;
}

// Solves gram[A][A] x = mu[A] by Cholesky; false if not positive definite.
bool SolveOnSupport(const std::vector<std::size_t>& active,
                    std::span<const double> mu, const Rows& gram,
                    std::vector<double>* x) {
  const std::size_t n = active.size();
  Rows l(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = gram[active[i]][active[j]];
      for (std::size_t k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
      if (i == j) {
        if (s <= 1e-12) return false;
        l[i][i] = std::sqrt(s);
      } else {
        l[i][j] = s / l[j][j];
      }
    }
  }
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = mu[active[i]];
    for (std::size_t k = 0; k < i; ++k) s -= l[i][k] * y[k];
    y[i] = s / l[i][i];
  }
  x->assign(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double s = y[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= l[k][i] * (*x)[k];
    (*x)[i] = s / l[i][i];
  }
  return true;
}

// Projected gradient ascent on the support, followed by an exact solve on
// the active set when that improves the optimality residual.
std::vector<double> FitWeights(std::vector<double> w,
                               std::span<const double> mu, const Rows& gram) {
  const std::size_t s = w.size();
  double lipschitz = 0.0;
  for (const auto& row : gram) {
    double total = 0.0;
    for (double v : row) total += std::abs(v);
    lipschitz = std::max(lipschitz, total);
  }
  const double step = 1.0 / std::max(lipschitz, 1e-12);
  for (int it = 0; it < kMaxIterations; ++it) {
    if (KktResidual(w, mu, gram) < kTolerance) break;
    const std::vector<double> g = Gradient(w, mu, gram);
    for (std::size_t i = 0; i < s; ++i) w[i] = std::max(0.0, w[i] + step * g[i]);
  }

  // Active-set refinement from the projected-gradient support.
  std::vector<bool> in_set(s, false);
  for (std::size_t i = 0; i < s; ++i) in_set[i] = w[i] > 0.0;
  for (int outer = 0; outer < 4 * static_cast<int>(s) + 4; ++outer) {
    bool changed = true;
    for (int inner = 0; changed && inner < 4 * static_cast<int>(s) + 4;
         ++inner) {
      changed = false;
      std::vector<std::size_t> active;
      for (std::size_t i = 0; i < s; ++i) {
        if (in_set[i]) active.push_back(i);
      }
      if (active.empty()) break;
      std::vector<double> z;
      if (!SolveOnSupport(active, mu, gram, &z)) return w;
      double alpha = 1.0;
      std::size_t blocking = s;
      for (std::size_t a = 0; a < active.size(); ++a) {
        if (z[a] <= 0.0) {
          const double wi = w[active[a]];
          const double ratio = wi / (wi - z[a]);
          if (ratio < alpha) {
            alpha = ratio;
            blocking = active[a];
          }
        }
      }
      std::vector<double> next(s, 0.0);
      for (std::size_t a = 0; a < active.size(); ++a) {
        const std::size_t i = active[a];
        next[i] = std::max(0.0, w[i] + alpha * (z[a] - w[i]));
        if (i == blocking || (blocking != s && next[i] <= 1e-15)) {
          next[i] = 0.0;
          in_set[i] = false;
          changed = true;
        }
      }
      w = std::move(next);
    }
    const std::vector<double> g = Gradient(w, mu, gram);
    std::size_t enter = s;
    double best = kTolerance;
    for (std::size_t i = 0; i < s; ++i) {
      if (!in_set[i] && g[i] > best) {
        best = g[i];
        enter = i;
      }
    }
    if (enter == s) break;
    in_set[enter] = true;
    w[enter] = 0.0;
  }
  return w;
}

void CheckRows(const Rows& rows, std::size_t width, const char* what) {
  for (const auto& row : rows) {
    if (row.size() != width) {
      throw Error(ErrorCode::kShape,
                  std::string(what) + " rows differ in width");
    }
  }
}

}  // namespace

double RbfKernel(std::span<const double> a, std::span<const double> b,
                 double bandwidth) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    d2 += d * d;
  }
  return std::exp(-d2 / (2.0 * bandwidth * bandwidth));
}

double MedianPairwiseDistance(const Rows& rows) {
  const std::size_t n = std::min(rows.size(), kMaxBandwidthRows);
  std::vector<double> distances;
  distances.reserve(n * (n - (n > 0 ? 1 : 0)) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < rows[i].size(); ++k) {
        const double d = rows[i][k] - rows[j][k];
        d2 += d * d;
      }
      distances.push_back(std::sqrt(d2));
    }
  }
  if (distances.empty()) return 1.0;
  const std::size_t mid = distances.size() / 2;
  std::nth_element(distances.begin(), distances.begin() + mid, distances.end());
  double median = distances[mid];
  if (distances.size() % 2 == 0) {
    const double lower =
        *std::max_element(distances.begin(), distances.begin() + mid);
    median = 0.5 * (median + lower);
  }
  return median > 0.0 ? median : 1.0;
}

PrototypeSet ProtoDash(const Rows& candidates, const Rows& target,
                       std::size_t k, const KernelSpec& kernel) {
  if (candidates.empty() || target.empty()) {
    throw Error(ErrorCode::kInput, "prototype selection needs candidate and "
                                   "target rows");
  }
  if (k == 0) {
    throw Error(ErrorCode::kConfig, "number of prototypes must be positive",
                "k");
  }
  if (!(kernel.bandwidth > 0.0) || !std::isfinite(kernel.bandwidth)) {
    throw Error(ErrorCode::kConfig, "kernel bandwidth must be positive",
                "bandwidth");
  }
  const std::size_t width = candidates[0].size();
  CheckRows(candidates, width, "candidate");
  CheckRows(target, width, "target");

  const std::size_t m = candidates.size();
  std::vector<double> mu(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    for (const auto& t : target) {
      mu[j] += RbfKernel(candidates[j], t, kernel.bandwidth);
    }
    mu[j] /= static_cast<double>(target.size());
  }

  PrototypeSet out;
  out.kernel = kernel;
  // columns[s][j] = k(candidate j, s-th selected prototype)
  Rows columns;
  std::vector<bool> selected(m, false);
  std::vector<double> w;
  const std::size_t limit = std::min(k, m);
  while (out.indices.size() < limit) {
    std::size_t best = m;
    double best_gradient = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (selected[j]) continue;
      double g = mu[j];
      for (std::size_t s = 0; s < w.size(); ++s) g -= columns[s][j] * w[s];
      if (g > best_gradient) {
        best_gradient = g;
        best = j;
      }
    }
    if (best == m || best_gradient <= kTolerance) break;
    selected[best] = true;
    out.indices.push_back(best);
    std::vector<double> column(m);
    for (std::size_t j = 0; j < m; ++j) {
      column[j] = RbfKernel(candidates[j], candidates[best], kernel.bandwidth);
    }
    columns.push_back(std::move(column));

    const std::size_t s = out.indices.size();
    Rows gram(s, std::vector<double>(s));
    std::vector<double> mu_s(s);
    for (std::size_t a = 0; a < s; ++a) {
      mu_s[a] = mu[out.indices[a]];
      for (std::size_t b = 0; b < s; ++b) gram[a][b] = columns[b][out.indices[a]];
    }
    w.push_back(0.0);
    w = FitWeights(std::move(w), mu_s, gram);
    out.objective_trace.push_back(Objective(w, mu_s, gram));
    out.kkt_residual = KktResidual(w, mu_s, gram);
  }
  out.weights = w;
  return out;
}

Json ToJson(const PrototypeSet& set) {
  return {
      {"indices", set.indices},
      {"weights", set.weights},
      {"objective_trace", set.objective_trace},
      {"kernel", {{"kind", "rbf"}, {"bandwidth", set.kernel.bandwidth}}},
      {"kkt_residual", set.kkt_residual},
  };
}

PrototypeSet PrototypeSetFromJson(const Json& json) {
  const std::string path = "/prototypes";
  PrototypeSet set;
  try {
    set.indices = RequireArray(json, "indices", path)
                      .get<std::vector<std::size_t>>();
    set.weights =
        RequireArray(json, "weights", path).get<std::vector<double>>();
    set.objective_trace =
        RequireArray(json, "objective_trace", path).get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kValidation, e.what(), path);
  }
  const Json& kernel = RequireField(json, "kernel", path);
  set.kernel.bandwidth = RequireNumber(kernel, "bandwidth", path + "/kernel");
  set.kkt_residual = RequireNumber(json, "kkt_residual", path);
  if (set.indices.size() != set.weights.size()) {
    throw Error(ErrorCode::kValidation, "indices and weights differ in length",
                path + "/weights");
  }
  return set;
}

}  // namespace ckdctx::explain
