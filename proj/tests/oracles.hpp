// Copyright 2026 The LogVeil Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Independent reference implementations used only by tests. Nothing here
// may call the code path it is checking.

#ifndef LOGVEIL_TESTS_ORACLES_HPP_
#define LOGVEIL_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "logveil/log.hpp"
#include "logveil/matrix.hpp"
#include "logveil/nn.hpp"

namespace logveil::oracles {

// Central finite differences of the single-example loss w.r.t. every
// parameter, walking the same flat layout the library uses.
inline std::vector<double> finite_difference_gradient(DenseNetwork net, Loss loss,
                                                      const double* input,
                                                      const double* target,
                                                      double h = 1e-5) {
  auto param = [&](std::size_t k) -> double& {
    for (Layer& layer : net.layers) {
      if (k < layer.weights.data.size()) return layer.weights.data[k];
      k -= layer.weights.data.size();
      if (k < layer.bias.size()) return layer.bias[k];
      k -= layer.bias.size();
    }
    throw std::out_of_range("parameter index");
  };
  const std::size_t count = net.parameter_count();
  std::vector<double> grad(count);
  for (std::size_t k = 0; k < count; ++k) {
    double& p = param(k);
    const double saved = p;
    p = saved + h;
    const double up = example_loss(net, loss, input, target);
    p = saved - h;
    const double down = example_loss(net, loss, input, target);
    p = saved;
    grad[k] = (up - down) / (2.0 * h);
  }
  return grad;
}

// Renyi divergence D_alpha(P || Q) between the Poisson-subsampled mixture
// P = (1-q) N(0, phi^2) + q N(1, phi^2) and the base Q = N(0, phi^2),
// by Simpson quadrature in the log domain.
inline double renyi_divergence_subsampled_gaussian(double q, double phi,
                                                   double alpha,
                                                   std::size_t points = 200001) {
  const double lo = -40.0 * phi - 5.0;
  const double hi = alpha * std::max(1.0, 1.0 / (phi * phi)) * phi * phi +
                    40.0 * phi + 5.0;
  const double dx = (hi - lo) / static_cast<double>(points - 1);

  // log integrand of E_Q[(P/Q)^alpha]: log Q(x) + alpha log(P/Q)(x)
  auto log_f = [&](double x) {
    const double log_gauss =
        -0.5 * (x / phi) * (x / phi) - std::log(phi) - 0.5 * std::log(2.0 * M_PI);
    const double u = (2.0 * x - 1.0) / (2.0 * phi * phi);  // log N(1)/N(0) ratio
    double log_ratio;  // log((1-q) + q e^u)
    if (u > 0.0) {
      log_ratio = std::log(q) + u + std::log1p((1.0 - q) / q * std::exp(-u));
    } else {
      log_ratio = std::log1p(-q + q * std::exp(u));
    }
    return log_gauss + alpha * log_ratio;
  };

  // Simpson weights folded into a log-sum-exp.
  double max_term = -std::numeric_limits<double>::infinity();
  std::vector<double> terms(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double w = (i == 0 || i + 1 == points) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    terms[i] = log_f(lo + dx * static_cast<double>(i)) + std::log(w);
    max_term = std::max(max_term, terms[i]);
  }
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - max_term);
  const double log_integral = max_term + std::log(sum) + std::log(dx / 3.0);
  return log_integral / (alpha - 1.0);
}

// ---------------------------------------------------------------------------
// transportation oracles

struct TransportInstance {
  std::vector<std::int64_t> supplies;
  std::vector<std::int64_t> demands;
  Matrix costs;  // supplies x demands
};

// Exhaustive enumeration over all integral transport plans (row-major DFS
// with remaining-capacity pruning). Only viable for tiny totals.
inline double brute_force_min_cost(const TransportInstance& inst) {
  const std::size_t s = inst.supplies.size();
  const std::size_t d = inst.demands.size();
  std::vector<std::int64_t> rem_demand = inst.demands;
  double best = std::numeric_limits<double>::infinity();

  std::function<void(std::size_t, std::size_t, std::int64_t, double)> step =
      [&](std::size_t i, std::size_t j, std::int64_t rem_row, double cost) {
        if (cost >= best) return;
        if (i == s) {
          bool done = true;
          for (std::int64_t r : rem_demand) done = done && r == 0;
          if (done) best = cost;
          return;
        }
        if (j == d) {
          if (rem_row == 0) step(i + 1, 0, i + 1 < s ? inst.supplies[i + 1] : 0, cost);
          return;
        }
        if (j + 1 == d) {
          // last column is forced
          if (rem_demand[j] >= rem_row) {
            rem_demand[j] -= rem_row;
            step(i, j + 1, 0, cost + static_cast<double>(rem_row) * inst.costs(i, j));
            rem_demand[j] += rem_row;
          }
          return;
        }
        const std::int64_t upper = std::min(rem_row, rem_demand[j]);
        for (std::int64_t f = 0; f <= upper; ++f) {
          rem_demand[j] -= f;
          step(i, j + 1, rem_row - f,
               cost + static_cast<double>(f) * inst.costs(i, j));
          rem_demand[j] += f;
        }
      };
  step(0, 0, inst.supplies.empty() ? 0 : inst.supplies[0], 0.0);
  return best;
}

// LP-vertex enumeration: every basic feasible solution of a balanced
// transportation polytope is supported on a spanning tree of the bipartite
// graph; enumerate all edge subsets of size s + d - 1, solve the unique
// flow by leaf peeling, keep the cheapest feasible one. Works with real
// masses, unlike the integral DFS above.
inline double vertex_enumeration_min_cost(const std::vector<double>& supplies,
                                          const std::vector<double>& demands,
                                          const Matrix& costs) {
  const std::size_t s = supplies.size();
  const std::size_t d = demands.size();
  const std::size_t nodes = s + d;
  const std::size_t edges = s * d;
  const std::size_t tree_size = nodes - 1;
  double best = std::numeric_limits<double>::infinity();

  std::vector<std::size_t> chosen(tree_size);
  std::function<void(std::size_t, std::size_t)> pick = [&](std::size_t start,
                                                           std::size_t k) {
    if (k == tree_size) {
      // adjacency over chosen edges
      std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(nodes);
      for (std::size_t e : chosen) {
        const std::size_t i = e / d;
        const std::size_t j = s + e % d;
        adj[i].push_back({j, e});
        adj[j].push_back({i, e});
      }
      std::vector<double> balance(nodes);
      for (std::size_t i = 0; i < s; ++i) balance[i] = supplies[i];
      for (std::size_t j = 0; j < d; ++j) balance[s + j] = -demands[j];

      std::vector<std::size_t> degree(nodes);
      for (std::size_t v = 0; v < nodes; ++v) degree[v] = adj[v].size();
      for (std::size_t v = 0; v < nodes; ++v) {
        if (degree[v] == 0) return;  // not spanning
      }
      std::vector<bool> edge_done(edges, false);
      std::vector<bool> node_done(nodes, false);
      std::vector<double> flow(edges, 0.0);
      std::vector<std::size_t> leaves;
      for (std::size_t v = 0; v < nodes; ++v) {
        if (degree[v] == 1) leaves.push_back(v);
      }
      std::size_t processed = 0;
      bool feasible = true;
      while (!leaves.empty()) {
        const std::size_t v = leaves.back();
        leaves.pop_back();
        if (node_done[v]) continue;
        std::size_t pending_edge = edges;
        std::size_t other = nodes;
        for (auto [u, e] : adj[v]) {
          if (!edge_done[e]) {
            pending_edge = e;
            other = u;
            break;
          }
        }
        if (pending_edge == edges) continue;
        // flow on the leaf edge is fixed by v's remaining balance,
        // oriented supply -> demand
        const double f = (v < s) ? balance[v] : -balance[v];
        if (f < -1e-9) {
          feasible = false;
          break;
        }
        flow[pending_edge] = f;
        balance[v] = 0.0;
        edge_done[pending_edge] = true;
        node_done[v] = true;
        ++processed;
        // shipping f from the supply side to the demand side
        if (v < s) {
          balance[other] += f;  // demand node receives
        } else {
          balance[other] -= f;  // supply node sheds
        }
        if (--degree[other] == 1) leaves.push_back(other);
      }
      if (!feasible || processed != tree_size) return;
      double cost = 0.0;
      for (std::size_t e = 0; e < edges; ++e) {
        cost += flow[e] * costs(e / d, e % d);
      }
      best = std::min(best, cost);
      return;
    }
    for (std::size_t e = start; e + (tree_size - k) <= edges; ++e) {
      chosen[k] = e;
      pick(e + 1, k + 1);
    }
  };
  pick(0, 0);
  return best;
}

// Full Wagner-Fischer table, kept independent of the two-row production
// implementation.
inline std::int64_t levenshtein_full_table(const TraceVariant& a,
                                           const TraceVariant& b) {
  const std::size_t n = a.activities.size();
  const std::size_t m = b.activities.size();
  std::vector<std::vector<std::int64_t>> table(n + 1,
                                               std::vector<std::int64_t>(m + 1));
  for (std::size_t i = 0; i <= n; ++i) table[i][0] = static_cast<std::int64_t>(i);
  for (std::size_t j = 0; j <= m; ++j) table[0][j] = static_cast<std::int64_t>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::int64_t sub =
          table[i - 1][j - 1] + (a.activities[i - 1] == b.activities[j - 1] ? 0 : 1);
      table[i][j] = std::min({table[i - 1][j] + 1, table[i][j - 1] + 1, sub});
    }
  }
  return table[n][m];
}

}  // namespace logveil::oracles

#endif  // LOGVEIL_TESTS_ORACLES_HPP_
