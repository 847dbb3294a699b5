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

#ifndef LOGVEIL_METRICS_HPP_
#define LOGVEIL_METRICS_HPP_

#include <cstdint>
#include <vector>

#include "logveil/log.hpp"
#include "logveil/matrix.hpp"

namespace logveil {

// Minimum insert/delete/substitute operations on activity labels.
std::int64_t levenshtein(const TraceVariant& a, const TraceVariant& b);

// levenshtein(a, b) / max(|a|, |b|); two empty variants score 0.
double normalized_levenshtein(const TraceVariant& a, const TraceVariant& b);

// Pairwise distance matrix between two variant lists (OpenMP across pairs;
// the serial version is the reference kept for testing).
Matrix levenshtein_cost_matrix(const std::vector<TraceVariant>& a,
                               const std::vector<TraceVariant>& b, bool normalized);
Matrix levenshtein_cost_matrix_serial(const std::vector<TraceVariant>& a,
                                      const std::vector<TraceVariant>& b,
                                      bool normalized);

// Balanced bipartite transportation instance: supply node i ships to demand
// node j at costs(i, j) >= 0.
struct FlowNetwork {
  std::vector<std::int64_t> supplies;
  std::vector<std::int64_t> demands;
  Matrix costs;  // supplies.size() x demands.size()
};

struct FlowResult {
  Matrix flow;  // integral assignment, supplies x demands
  double cost;
};

// Exact successive-shortest-paths solver; integral flows for integral
// supplies. Throws on an unbalanced network.
FlowResult min_cost_flow(const FlowNetwork& network);

// 1 - EMD between the relative variant distributions of the two logs under
// the normalized Levenshtein ground distance. 1 for identical distributions.
double relative_log_similarity(const SimpleEventLog& a, const SimpleEventLog& b);

// Minimum total Levenshtein operations that turn the anonymized log's
// variants into the original's, frequencies taken absolutely; a dummy node
// priced at full trace length absorbs any case-count imbalance.
double absolute_log_difference(const SimpleEventLog& original,
                               const SimpleEventLog& anonymized);

}  // namespace logveil

#endif  // LOGVEIL_METRICS_HPP_
