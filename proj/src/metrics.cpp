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

#include "logveil/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "logveil/error.hpp"

namespace logveil {
namespace {

// Nodes: supplies first, then demands. Distances carry Johnson potentials so
// reduced costs stay non-negative across augmentations.
class TransportationSolver {
 public:
  explicit TransportationSolver(const FlowNetwork& net)
      : net_(net),
        n_supply_(net.supplies.size()),
        n_demand_(net.demands.size()),
        remaining_supply_(net.supplies),
        remaining_demand_(net.demands),
        potential_(n_supply_ + n_demand_, 0.0),
        flow_(n_supply_ * n_demand_, 0) {}

  FlowResult solve() {
    std::int64_t outstanding =
        std::accumulate(remaining_demand_.begin(), remaining_demand_.end(),
                        std::int64_t{0});
    while (outstanding > 0) {
      const std::int64_t pushed = augment();
      if (pushed == 0) throw Error("min-cost flow failed to route all demand");
      outstanding -= pushed;
    }
    FlowResult result{Matrix(n_supply_, n_demand_), 0.0};
    for (std::size_t i = 0; i < n_supply_; ++i) {
      for (std::size_t j = 0; j < n_demand_; ++j) {
        result.flow(i, j) = static_cast<double>(flow(i, j));
        result.cost += static_cast<double>(flow(i, j)) * net_.costs(i, j);
      }
    }
    return result;
  }

 private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();

  std::int64_t& flow(std::size_t i, std::size_t j) {
    return flow_[i * n_demand_ + j];
  }

  // One Dijkstra pass from every supply node with remaining stock, then one
  // augmentation along the cheapest path to a demand node with remaining
  // need. Branch arcs are uncapacitated, so the bottleneck is always an
  // endpoint's remaining amount.
  std::int64_t augment() {
    const std::size_t n = n_supply_ + n_demand_;
    std::vector<double> dist(n, kInf);
    std::vector<std::size_t> parent(n, n);
    std::vector<bool> done(n, false);

    for (std::size_t i = 0; i < n_supply_; ++i) {
      if (remaining_supply_[i] > 0) dist[i] = 0.0;
    }

    for (;;) {
      std::size_t u = n;
      double best = kInf;
      for (std::size_t v = 0; v < n; ++v) {
        if (!done[v] && dist[v] < best) {
          best = dist[v];
          u = v;
        }
      }
      if (u == n) break;
      done[u] = true;

      if (u < n_supply_) {
        const std::size_t i = u;
        for (std::size_t j = 0; j < n_demand_; ++j) {
          const std::size_t v = n_supply_ + j;
          if (done[v]) continue;
          const double reduced =
              net_.costs(i, j) + potential_[u] - potential_[v];
          if (dist[u] + reduced < dist[v]) {
            dist[v] = dist[u] + reduced;
            parent[v] = u;
          }
        }
      } else {
        const std::size_t j = u - n_supply_;
        for (std::size_t i = 0; i < n_supply_; ++i) {
          if (done[i] || flow(i, j) <= 0) continue;
          const double reduced =
              -net_.costs(i, j) + potential_[u] - potential_[i];
          if (dist[u] + reduced < dist[i]) {
            dist[i] = dist[u] + reduced;
            parent[i] = u;
          }
        }
      }
    }

    std::size_t target = n;
    double target_dist = kInf;
    for (std::size_t j = 0; j < n_demand_; ++j) {
      const std::size_t v = n_supply_ + j;
      if (remaining_demand_[j] > 0 && dist[v] < target_dist) {
        target_dist = dist[v];
        target = v;
      }
    }
    if (target == n) return 0;

    std::int64_t bottleneck = remaining_demand_[target - n_supply_];
    for (std::size_t v = target; parent[v] != n_supply_ + n_demand_;) {
      const std::size_t u = parent[v];
      if (v >= n_supply_ && u < n_supply_) {
        // forward arc, uncapacitated
      } else {
        bottleneck = std::min(bottleneck, flow(v, u - n_supply_));
      }
      if (parent[u] == n_supply_ + n_demand_) {
        bottleneck = std::min(bottleneck, remaining_supply_[u]);
        break;
      }
      v = u;
    }

    std::size_t v = target;
    while (true) {
      const std::size_t u = parent[v];
      if (v >= n_supply_ && u < n_supply_) {
        flow(u, v - n_supply_) += bottleneck;
      } else {
        flow(v, u - n_supply_) -= bottleneck;
      }
      if (parent[u] == n_supply_ + n_demand_) {
        remaining_supply_[u] -= bottleneck;
        break;
      }
      v = u;
    }
    remaining_demand_[target - n_supply_] -= bottleneck;

    for (std::size_t w = 0; w < n; ++w) {
      if (dist[w] < kInf) potential_[w] += dist[w];
    }
    return bottleneck;
  }

  const FlowNetwork& net_;
  std::size_t n_supply_;
  std::size_t n_demand_;
  std::vector<std::int64_t> remaining_supply_;
  std::vector<std::int64_t> remaining_demand_;
  std::vector<double> potential_;
  std::vector<std::int64_t> flow_;
};

std::vector<TraceVariant> variant_list(const SimpleEventLog& log) {
  std::vector<TraceVariant> out;
  out.reserve(log.variants.size());
  for (const auto& [variant, freq] : log.variants) out.push_back(variant);
  return out;
}

void cost_matrix_row(const std::vector<TraceVariant>& a,
                     const std::vector<TraceVariant>& b, bool normalized,
                     std::size_t i, Matrix& out) {
  for (std::size_t j = 0; j < b.size(); ++j) {
    out(i, j) = normalized ? normalized_levenshtein(a[i], b[j])
                           : static_cast<double>(levenshtein(a[i], b[j]));
  }
}

}  // namespace

std::int64_t levenshtein(const TraceVariant& a, const TraceVariant& b) {
  const auto& s = a.activities;
  const auto& t = b.activities;
  if (s.empty()) return static_cast<std::int64_t>(t.size());
  if (t.empty()) return static_cast<std::int64_t>(s.size());

  std::vector<std::int64_t> prev(t.size() + 1);
  std::vector<std::int64_t> curr(t.size() + 1);
  std::iota(prev.begin(), prev.end(), std::int64_t{0});
  for (std::size_t i = 1; i <= s.size(); ++i) {
    curr[0] = static_cast<std::int64_t>(i);
    for (std::size_t j = 1; j <= t.size(); ++j) {
      const std::int64_t substitute =
          prev[j - 1] + (s[i - 1] == t[j - 1] ? 0 : 1);
      curr[j] = std::min({prev[j] + 1, curr[j - 1] + 1, substitute});
    }
    std::swap(prev, curr);
  }
  return prev[t.size()];
}

double normalized_levenshtein(const TraceVariant& a, const TraceVariant& b) {
  const std::size_t longest = std::max(a.length(), b.length());
  if (longest == 0) return 0.0;
  return static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
}

Matrix levenshtein_cost_matrix(const std::vector<TraceVariant>& a,
                               const std::vector<TraceVariant>& b, bool normalized) {
  Matrix out(a.size(), b.size());
  const std::int64_t rows = static_cast<std::int64_t>(a.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t i = 0; i < rows; ++i) {
    cost_matrix_row(a, b, normalized, static_cast<std::size_t>(i), out);
  }
  return out;
}

Matrix levenshtein_cost_matrix_serial(const std::vector<TraceVariant>& a,
                                      const std::vector<TraceVariant>& b,
                                      bool normalized) {
  Matrix out(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    cost_matrix_row(a, b, normalized, i, out);
  }
  return out;
}

FlowResult min_cost_flow(const FlowNetwork& network) {
  if (network.supplies.empty() || network.demands.empty()) {
    throw InputError("flow network needs at least one supply and one demand");
  }
  if (network.costs.rows != network.supplies.size() ||
      network.costs.cols != network.demands.size()) {
    throw InputError("cost matrix shape does not match node counts");
  }
  std::int64_t total_supply = 0;
  std::int64_t total_demand = 0;
  for (std::int64_t s : network.supplies) {
    if (s < 0) throw InputError("negative supply");
    total_supply += s;
  }
  for (std::int64_t d : network.demands) {
    if (d < 0) throw InputError("negative demand");
    total_demand += d;
  }
  if (total_supply != total_demand) throw InputError("unbalanced network");
  for (double c : network.costs.data) {
    if (!(c >= 0.0)) throw InputError("arc costs must be non-negative");
  }
  if (total_supply == 0) {
    return {Matrix(network.supplies.size(), network.demands.size()), 0.0};
  }
  return TransportationSolver(network).solve();
}

double relative_log_similarity(const SimpleEventLog& a, const SimpleEventLog& b) {
  if (a.empty() || b.empty()) throw InputError("empty log");
  const std::vector<TraceVariant> va = variant_list(a);
  const std::vector<TraceVariant> vb = variant_list(b);
  const std::int64_t total_a = a.total_cases();
  const std::int64_t total_b = b.total_cases();

  // Scaling both sides by the opposite total turns the two relative
  // distributions into one balanced integral transportation problem.
  FlowNetwork net;
  net.supplies.reserve(va.size());
  net.demands.reserve(vb.size());
  for (const TraceVariant& v : va) net.supplies.push_back(a.variants.at(v) * total_b);
  for (const TraceVariant& v : vb) net.demands.push_back(b.variants.at(v) * total_a);
  net.costs = levenshtein_cost_matrix(va, vb, /*normalized=*/true);

  const FlowResult result = min_cost_flow(net);
  const double emd =
      result.cost / (static_cast<double>(total_a) * static_cast<double>(total_b));
  return 1.0 - emd;
}

double absolute_log_difference(const SimpleEventLog& original,
                               const SimpleEventLog& anonymized) {
  if (original.empty() || anonymized.empty()) throw InputError("empty log");
  std::vector<TraceVariant> supply_variants = variant_list(anonymized);
  std::vector<TraceVariant> demand_variants = variant_list(original);

  FlowNetwork net;
  for (const TraceVariant& v : supply_variants) {
    net.supplies.push_back(anonymized.variants.at(v));
  }
  for (const TraceVariant& v : demand_variants) {
    net.demands.push_back(original.variants.at(v));
  }
  const std::int64_t total_supply = anonymized.total_cases();
  const std::int64_t total_demand = original.total_cases();

  net.costs = levenshtein_cost_matrix(supply_variants, demand_variants,
                                      /*normalized=*/false);

  // Imbalance is bridged by whole-trace insertions or deletions: a dummy
  // node whose arc to variant sigma costs |sigma|.
  if (total_supply < total_demand) {
    net.supplies.push_back(total_demand - total_supply);
    Matrix costs(net.supplies.size(), net.demands.size());
    for (std::size_t i = 0; i + 1 < net.supplies.size(); ++i) {
      for (std::size_t j = 0; j < net.demands.size(); ++j) {
        costs(i, j) = net.costs(i, j);
      }
    }
    for (std::size_t j = 0; j < net.demands.size(); ++j) {
      costs(net.supplies.size() - 1, j) =
          static_cast<double>(demand_variants[j].length());
    }
    net.costs = std::move(costs);
  } else if (total_supply > total_demand) {
    net.demands.push_back(total_supply - total_demand);
    Matrix costs(net.supplies.size(), net.demands.size());
    for (std::size_t i = 0; i < net.supplies.size(); ++i) {
      for (std::size_t j = 0; j + 1 < net.demands.size(); ++j) {
        costs(i, j) = net.costs(i, j);
      }
      costs(i, net.demands.size() - 1) =
          static_cast<double>(supply_variants[i].length());
    }
    net.costs = std::move(costs);
  }

  return min_cost_flow(net).cost;
}

}  // namespace logveil
