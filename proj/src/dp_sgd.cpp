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

#include "logveil/dp_sgd.hpp"

#include <cmath>
#include <cstring>

#include "logveil/error.hpp"

namespace logveil {
namespace {

void clip_in_place(double* g, std::size_t n, double clip_norm) {
  double norm_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(g[i])) throw InputError("non-finite gradient");
    norm_sq += g[i] * g[i];
  }
  const double norm = std::sqrt(norm_sq);
  if (norm > clip_norm) {
    const double scale = clip_norm / norm;
    for (std::size_t i = 0; i < n; ++i) g[i] *= scale;
  }
}

void add_noise_and_average(std::vector<double>& sum, std::size_t groups,
                           double clip_norm, double noise_multiplier, Rng& rng) {
  if (noise_multiplier > 0.0) {
    const double sigma = clip_norm * noise_multiplier;
    for (double& v : sum) v += sigma * rng.gaussian();
  }
  const double inv = 1.0 / static_cast<double>(groups);
  for (double& v : sum) v *= inv;
}

}  // namespace

void DpSgdConfig::validate() const {
  if (!(clip_norm > 0.0)) throw InputError("clip_norm must be positive");
  if (!(noise_multiplier >= 0.0)) throw InputError("noise_multiplier must be non-negative");
  if (!(sampling_rate > 0.0) || sampling_rate > 1.0) {
    throw InputError("sampling_rate must be in (0, 1]");
  }
  if (microbatch_size < 1) throw InputError("microbatch_size must be at least 1");
  if (!(learning_rate > 0.0)) throw InputError("learning_rate must be positive");
}

std::vector<double> clip_gradient(std::vector<double> gradient, double clip_norm) {
  if (!(clip_norm > 0.0)) throw InputError("clip_norm must be positive");
  clip_in_place(gradient.data(), gradient.size(), clip_norm);
  return gradient;
}

std::vector<double> noisy_batch_gradient(const Matrix& per_example_grads,
                                         double clip_norm, double noise_multiplier,
                                         Rng& rng) {
  if (per_example_grads.rows == 0) {
    throw Error("empty Poisson batch: skip step");
  }
  const std::size_t p = per_example_grads.cols;
  std::vector<double> sum(p, 0.0);
  std::vector<double> clipped(p);
  for (std::size_t i = 0; i < per_example_grads.rows; ++i) {
    std::memcpy(clipped.data(), per_example_grads.row(i), p * sizeof(double));
    clip_in_place(clipped.data(), p, clip_norm);
    for (std::size_t k = 0; k < p; ++k) sum[k] += clipped[k];
  }
  add_noise_and_average(sum, per_example_grads.rows, clip_norm, noise_multiplier, rng);
  return sum;
}

std::vector<double> microbatch_gradient(const Matrix& per_example_grads,
                                        std::size_t microbatch_size,
                                        double clip_norm, double noise_multiplier,
                                        Rng& rng) {
  if (microbatch_size < 1) throw InputError("microbatch_size must be at least 1");
  const std::size_t groups = per_example_grads.rows / microbatch_size;
  if (groups == 0) {
    throw Error("empty Poisson batch: skip step");
  }
  const std::size_t p = per_example_grads.cols;
  const double inv_r = 1.0 / static_cast<double>(microbatch_size);
  std::vector<double> sum(p, 0.0);
  std::vector<double> group_mean(p);
  for (std::size_t g = 0; g < groups; ++g) {
    std::fill(group_mean.begin(), group_mean.end(), 0.0);
    for (std::size_t r = 0; r < microbatch_size; ++r) {
      const double* row = per_example_grads.row(g * microbatch_size + r);
      for (std::size_t k = 0; k < p; ++k) group_mean[k] += row[k];
    }
    for (std::size_t k = 0; k < p; ++k) group_mean[k] *= inv_r;
    clip_in_place(group_mean.data(), p, clip_norm);
    for (std::size_t k = 0; k < p; ++k) sum[k] += group_mean[k];
  }
  add_noise_and_average(sum, groups, clip_norm, noise_multiplier, rng);
  return sum;
}

std::vector<std::size_t> poisson_sample(std::size_t dataset_size,
                                        double sampling_rate, Rng& rng) {
  if (!(sampling_rate > 0.0) || sampling_rate > 1.0) {
    throw InputError("sampling_rate must be in (0, 1]");
  }
  std::vector<std::size_t> indices;
  for (std::size_t i = 0; i < dataset_size; ++i) {
    if (rng.uniform() < sampling_rate) indices.push_back(i);
  }
  return indices;
}

Matrix gather_rows(const Matrix& source, const std::vector<std::size_t>& indices) {
  Matrix out(indices.size(), source.cols);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    std::memcpy(out.row(i), source.row(indices[i]), source.cols * sizeof(double));
  }
  return out;
}

bool dp_sgd_step(DenseNetwork& net, Loss loss, const Matrix& inputs,
                 const Matrix& targets, const DpSgdConfig& config, Rng& rng) {
  config.validate();
  const std::vector<std::size_t> batch =
      poisson_sample(inputs.rows, config.sampling_rate, rng);
  if (batch.size() / config.microbatch_size == 0) return false;

  const Matrix batch_inputs = gather_rows(inputs, batch);
  const Matrix batch_targets = gather_rows(targets, batch);
  const Matrix grads = per_example_gradients(net, loss, batch_inputs, batch_targets);
  const std::vector<double> update =
      microbatch_gradient(grads, config.microbatch_size, config.clip_norm,
                          config.noise_multiplier, rng);
  apply_update(net, update, config.learning_rate);
  return true;
}

}  // namespace logveil
