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

#ifndef LOGVEIL_DP_SGD_HPP_
#define LOGVEIL_DP_SGD_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "logveil/matrix.hpp"
#include "logveil/nn.hpp"
#include "logveil/rng.hpp"

namespace logveil {

struct DpSgdConfig {
  double clip_norm = 1.0;          // C
  double noise_multiplier = 0.0;   // noise std = clip_norm * noise_multiplier
  double sampling_rate = 1.0;      // per-record Poisson inclusion probability q
  std::size_t microbatch_size = 1; // r; 1 is per-example clipping
  double learning_rate = 1e-3;
  std::size_t iterations = 1;
  std::uint64_t seed = 0;

  void validate() const;  // throws InputError on out-of-range fields
};

// g * min(1, clip_norm / ||g||_2); identity whenever the norm is already
// within the bound, so the boundary case stays bit-exact.
std::vector<double> clip_gradient(std::vector<double> gradient, double clip_norm);

// (1/|B|) (sum_i clip(g_i, C) + N(0, C^2 Phi^2 I)). With a zero noise
// multiplier this is exactly the clipped mean. Throws on an empty batch.
std::vector<double> noisy_batch_gradient(const Matrix& per_example_grads,
                                         double clip_norm, double noise_multiplier,
                                         Rng& rng);

// Eq-style microbatch variant: rows are grouped into k = m / r groups of
// size r (remainder dropped), each group's mean gradient is clipped as one
// unit. r = 1 coincides with noisy_batch_gradient on the same rng stream.
std::vector<double> microbatch_gradient(const Matrix& per_example_grads,
                                        std::size_t microbatch_size,
                                        double clip_norm, double noise_multiplier,
                                        Rng& rng);

// Each index of 0 .. dataset_size-1 independently with probability q.
std::vector<std::size_t> poisson_sample(std::size_t dataset_size,
                                        double sampling_rate, Rng& rng);

// One DP-SGD step: Poisson sample, per-example (or microbatch) clipped
// noisy gradient, one parameter update. Returns false when the sampled
// batch was empty; the step still counts toward the privacy accountant.
bool dp_sgd_step(DenseNetwork& net, Loss loss, const Matrix& inputs,
                 const Matrix& targets, const DpSgdConfig& config, Rng& rng);

Matrix gather_rows(const Matrix& source, const std::vector<std::size_t>& indices);

}  // namespace logveil

#endif  // LOGVEIL_DP_SGD_HPP_
