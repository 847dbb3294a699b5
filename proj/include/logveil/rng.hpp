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

#ifndef LOGVEIL_RNG_HPP_
#define LOGVEIL_RNG_HPP_

#include <cstdint>
#include <random>
#include <vector>

namespace logveil {

// Deterministic random stream. All randomness in the toolkit flows through
// this class so that a run is reproducible from its master seed. Child
// streams created with fork() depend only on the parent's seed and the
// stream id, never on the parent's draw position, which lets parallel
// consumers be seeded up front in any order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64();

  // Uniform draw in [0, 1).
  double uniform();

  // Standard normal draw (Box-Muller; consumes exactly two engine words).
  double gaussian();

  // Uniform index in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n);

  std::vector<double> gaussian_vector(std::size_t n);

  // Independent child stream identified by `stream`.
  Rng fork(std::uint64_t stream) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace logveil

#endif  // LOGVEIL_RNG_HPP_
