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

#ifndef LOGVEIL_SYNTH_HPP_
#define LOGVEIL_SYNTH_HPP_

#include <cstdint>

#include "logveil/log.hpp"

namespace logveil {

// Seeded generator for test logs: distinct random variants with Zipf-shaped
// case counts (skew 0 is uniform). Counts are apportioned deterministically
// by largest remainder after granting each variant one case.
struct SynthConfig {
  std::int64_t cases = 500;
  std::size_t variant_count = 5;
  double zipf_skew = 1.0;
  std::size_t min_length = 2;
  std::size_t max_length = 8;
  std::size_t alphabet = 12;
  std::uint64_t seed = 7;
};

SimpleEventLog synth_log(const SynthConfig& config);

}  // namespace logveil

#endif  // LOGVEIL_SYNTH_HPP_
