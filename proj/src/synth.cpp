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

#include "logveil/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "logveil/error.hpp"
#include "logveil/rng.hpp"

namespace logveil {

SimpleEventLog synth_log(const SynthConfig& config) {
  if (config.variant_count == 0) throw InputError("variant_count must be positive");
  if (config.cases < static_cast<std::int64_t>(config.variant_count)) {
    throw InputError("need at least one case per variant");
  }
  if (config.min_length == 0 || config.min_length > config.max_length) {
    throw InputError("invalid variant length range");
  }
  if (config.alphabet == 0) throw InputError("alphabet must be non-empty");
  if (!(config.zipf_skew >= 0.0)) throw InputError("zipf_skew must be non-negative");

  Rng rng(config.seed);

  std::vector<std::string> activities(config.alphabet);
  for (std::size_t i = 0; i < config.alphabet; ++i) {
    if (config.alphabet <= 26) {
      activities[i] = std::string(1, static_cast<char>('a' + i));
    } else {
      activities[i] = "act_" + std::to_string(i);
    }
  }

  std::set<TraceVariant> seen;
  std::vector<TraceVariant> variants;
  std::size_t rejected = 0;
  while (variants.size() < config.variant_count) {
    const std::size_t length =
        config.min_length + rng.uniform_index(config.max_length - config.min_length + 1);
    TraceVariant variant;
    variant.activities.reserve(length);
    for (std::size_t k = 0; k < length; ++k) {
      variant.activities.push_back(activities[rng.uniform_index(config.alphabet)]);
    }
    if (seen.insert(variant).second) {
      variants.push_back(std::move(variant));
    } else if (++rejected > 1000 * config.variant_count) {
      throw InputError(
          "cannot draw enough distinct variants; enlarge the alphabet or the "
          "length range");
    }
  }

  // Zipf weights over variant rank, one guaranteed case per variant, the
  // rest apportioned by largest remainder.
  std::vector<double> weights(config.variant_count);
  double weight_sum = 0.0;
  for (std::size_t i = 0; i < config.variant_count; ++i) {
    weights[i] = 1.0 / std::pow(static_cast<double>(i + 1), config.zipf_skew);
    weight_sum += weights[i];
  }
  const std::int64_t spare =
      config.cases - static_cast<std::int64_t>(config.variant_count);
  std::vector<std::int64_t> counts(config.variant_count, 1);
  std::vector<std::pair<double, std::size_t>> remainders(config.variant_count);
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < config.variant_count; ++i) {
    const double share = static_cast<double>(spare) * weights[i] / weight_sum;
    const std::int64_t whole = static_cast<std::int64_t>(std::floor(share));
    counts[i] += whole;
    assigned += whole;
    remainders[i] = {share - static_cast<double>(whole), i};
  }
  std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (std::int64_t k = 0; k < spare - assigned; ++k) {
    ++counts[remainders[static_cast<std::size_t>(k)].second];
  }

  SimpleEventLog log;
  for (std::size_t i = 0; i < config.variant_count; ++i) {
    log.add(variants[i], counts[i]);
  }
  return log;
}

}  // namespace logveil
