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

#ifndef LOGVEIL_DDPM_HPP_
#define LOGVEIL_DDPM_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "logveil/accountant.hpp"
#include "logveil/dp_sgd.hpp"
#include "logveil/encoding.hpp"
#include "logveil/nn.hpp"

namespace logveil::ddpm {

// Variance schedule of the forward chain and everything derived from it.
// Indexing is by t - 1 for t = 1 .. T; alpha_bar[0] uses the convention
// alpha_bar at t = 0 equals 1, which makes posterior_variance[0] exactly 0.
struct NoiseSchedule {
  std::vector<double> beta;
  std::vector<double> alpha;               // 1 - beta_t
  std::vector<double> alpha_bar;           // prod_{s<=t} alpha_s
  std::vector<double> posterior_variance;  // beta_t (1 - alpha_bar_{t-1}) / (1 - alpha_bar_t)

  std::size_t steps() const { return beta.size(); }
};

inline constexpr std::size_t kDefaultSteps = 300;
inline constexpr double kDefaultBetaStart = 1e-4;
// The endpoint is picked so alpha_bar at T = 300 drops below 1e-3 and the
// chain's terminal state is indistinguishable from an isotropic Gaussian.
inline constexpr double kDefaultBetaEnd = 0.07;

// Linear beta interpolation from beta_start to beta_end over `steps` steps.
NoiseSchedule build_schedule(std::size_t steps, double beta_start, double beta_end);

// x_t = sqrt(alpha_bar_t) x0 + sqrt(1 - alpha_bar_t) noise, 1 <= t <= T.
std::vector<double> forward_sample(const std::vector<double>& x0, std::size_t t,
                                   const std::vector<double>& noise,
                                   const NoiseSchedule& schedule);

struct Config {
  std::size_t embed_dim = 32;
  std::vector<std::size_t> hidden = {256, 256};
  std::size_t schedule_steps = kDefaultSteps;
  double beta_start = kDefaultBetaStart;
  double beta_end = kDefaultBetaEnd;
  DpSgdConfig dp;
  double delta = 1e-6;  // accounting delta for the trained predictor
};

struct Model {
  VariantVocabulary vocab;
  NoiseSchedule schedule;
  DenseNetwork predictor;  // (x_t, time embedding) -> noise estimate
  std::size_t embed_dim = 0;
  std::optional<PrivacySpec> privacy;
  std::int64_t original_cases = 0;
};

// Sets dp.noise_multiplier so the accounted budget meets the target.
void calibrate(Config& config, const PrivacySpec& target);

// DP-SGD training of the noise predictor on (row, step, noise) triples:
// each step Poisson-samples rows, draws a uniform step number and fresh
// noise per row, and regresses the predictor on the added noise.
Model train(const EncodedLog& encoded, const NoiseSchedule& schedule,
            const Config& config);
Model train(const EncodedLog& encoded, const Config& config);

std::vector<double> predict_noise(const Model& model, const std::vector<double>& x_t,
                                  std::size_t t);

// x_{t-1} = (x_t - beta_t / sqrt(1 - alpha_bar_t) * eps_hat) / sqrt(alpha_t)
//           + sqrt(posterior_variance_t) * z
// posterior_variance at t = 1 is 0, so the final step is deterministic.
std::vector<double> reverse_step(const std::vector<double>& x_t, std::size_t t,
                                 const Model& model, const std::vector<double>& z);

// Draws x_T ~ N(0, I) per sample, runs the reverse chain down to x_0 and
// argmax-decodes it; never emits a variant outside the vocabulary.
SimpleEventLog generate(const Model& model, std::int64_t count, Rng& rng);

}  // namespace logveil::ddpm

#endif  // LOGVEIL_DDPM_HPP_
