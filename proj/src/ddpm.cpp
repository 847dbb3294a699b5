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

#include "logveil/ddpm.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "logveil/error.hpp"

namespace logveil::ddpm {
namespace {

constexpr std::uint64_t kInitStreamBase = 1'000'000'000ULL;
constexpr const char* kDivergedMessage =
    "training diverged: reduce the learning rate or raise the noise multiplier";

// Overflow guard for reverse-chain states; far outside any healthy value
// range, only reachable when training was drowned in noise on purpose.
constexpr double kStateBound = 1e6;

void check_finite_parameters(const DenseNetwork& net) {
  for (const Layer& layer : net.layers) {
    for (double w : layer.weights.data) {
      if (!std::isfinite(w)) throw DivergenceError(kDivergedMessage);
    }
    for (double b : layer.bias) {
      if (!std::isfinite(b)) throw DivergenceError(kDivergedMessage);
    }
  }
}

void check_step_range(std::size_t t, const NoiseSchedule& schedule) {
  if (t < 1 || t > schedule.steps()) {
    throw InputError("diffusion step out of range");
  }
}

}  // namespace

NoiseSchedule build_schedule(std::size_t steps, double beta_start, double beta_end) {
  if (steps < 1) throw InputError("schedule needs at least one step");
  if (!(beta_start > 0.0) || !(beta_start <= beta_end) || !(beta_end < 1.0)) {
    throw InputError("betas must satisfy 0 < beta_start <= beta_end < 1");
  }
  NoiseSchedule schedule;
  schedule.beta.resize(steps);
  schedule.alpha.resize(steps);
  schedule.alpha_bar.resize(steps);
  schedule.posterior_variance.resize(steps);

  double alpha_bar_prev = 1.0;
  for (std::size_t i = 0; i < steps; ++i) {
    const double frac =
        (steps == 1) ? 0.0
                     : static_cast<double>(i) / static_cast<double>(steps - 1);
    schedule.beta[i] = beta_start + (beta_end - beta_start) * frac;
    schedule.alpha[i] = 1.0 - schedule.beta[i];
    schedule.alpha_bar[i] = alpha_bar_prev * schedule.alpha[i];
    schedule.posterior_variance[i] =
        schedule.beta[i] * (1.0 - alpha_bar_prev) / (1.0 - schedule.alpha_bar[i]);
    alpha_bar_prev = schedule.alpha_bar[i];
  }
  return schedule;
}

std::vector<double> forward_sample(const std::vector<double>& x0, std::size_t t,
                                   const std::vector<double>& noise,
                                   const NoiseSchedule& schedule) {
  check_step_range(t, schedule);
  if (x0.size() != noise.size()) throw InputError("noise dimension mismatch");
  const double alpha_bar = schedule.alpha_bar[t - 1];
  const double signal = std::sqrt(alpha_bar);
  const double spread = std::sqrt(1.0 - alpha_bar);
  std::vector<double> x_t(x0.size());
  for (std::size_t i = 0; i < x0.size(); ++i) {
    x_t[i] = signal * x0[i] + spread * noise[i];
  }
  return x_t;
}

void calibrate(Config& config, const PrivacySpec& target) {
  target.validate();
  config.dp.noise_multiplier =
      calibrate_noise(target, config.dp.sampling_rate, config.dp.iterations)
          .noise_multiplier;
  config.delta = target.delta;
}

Model train(const EncodedLog& encoded, const NoiseSchedule& schedule,
            const Config& config) {
  const Matrix& one_hot = encoded.one_hot;
  if (one_hot.rows == 0 || one_hot.cols == 0) throw InputError("empty training matrix");
  config.dp.validate();
  if (config.embed_dim == 0 || config.embed_dim % 2 != 0) {
    throw InputError("time embedding dimension must be even and positive");
  }
  const std::size_t n = one_hot.cols;
  const std::size_t steps = schedule.steps();

  Model model;
  model.vocab = encoded.vocab;
  model.schedule = schedule;
  model.embed_dim = config.embed_dim;
  model.original_cases = static_cast<std::int64_t>(one_hot.rows);

  Rng master(config.dp.seed);
  Rng init_rng = master.fork(kInitStreamBase);
  std::vector<std::size_t> dims;
  dims.push_back(n + config.embed_dim);
  for (std::size_t h : config.hidden) dims.push_back(h);
  dims.push_back(n);
  std::vector<Activation> activations(dims.size() - 1, Activation::relu);
  activations.back() = Activation::linear;
  model.predictor = make_network(dims, activations, init_rng);

  AccountantState accountant(config.dp.sampling_rate, config.dp.noise_multiplier);

  for (std::size_t step = 0; step < config.dp.iterations; ++step) {
    Rng step_rng = master.fork(step);
    const std::vector<std::size_t> batch =
        poisson_sample(one_hot.rows, config.dp.sampling_rate, step_rng);
    accountant.record_steps(1);
    if (batch.size() / config.dp.microbatch_size == 0) continue;

    // One (row, step number, noise) triple per sampled case.
    Matrix inputs(batch.size(), n + config.embed_dim);
    Matrix targets(batch.size(), n);
    for (std::size_t k = 0; k < batch.size(); ++k) {
      const std::size_t t = step_rng.uniform_index(steps) + 1;
      const std::vector<double> noise = step_rng.gaussian_vector(n);
      const std::vector<double> x0 = one_hot.row_vector(batch[k]);
      const std::vector<double> x_t = forward_sample(x0, t, noise, schedule);
      const std::vector<double> embedding =
          time_embedding(static_cast<double>(t), config.embed_dim);
      std::memcpy(inputs.row(k), x_t.data(), n * sizeof(double));
      std::memcpy(inputs.row(k) + n, embedding.data(),
                  config.embed_dim * sizeof(double));
      std::memcpy(targets.row(k), noise.data(), n * sizeof(double));
    }

    const Matrix grads =
        per_example_gradients(model.predictor, Loss::mse, inputs, targets);
    std::vector<double> update;
    try {
      update = microbatch_gradient(grads, config.dp.microbatch_size,
                                   config.dp.clip_norm, config.dp.noise_multiplier,
                                   step_rng);
    } catch (const InputError&) {
      throw DivergenceError(kDivergedMessage);
    }
    apply_update(model.predictor, update, config.dp.learning_rate);
    check_finite_parameters(model.predictor);
  }

  if (config.dp.noise_multiplier > 0.0) {
    model.privacy = accountant.spec_for_delta(config.delta);
  } else {
    model.privacy = PrivacySpec{std::numeric_limits<double>::infinity(), config.delta};
  }
  return model;
}

Model train(const EncodedLog& encoded, const Config& config) {
  return train(encoded,
               build_schedule(config.schedule_steps, config.beta_start, config.beta_end),
               config);
}

std::vector<double> predict_noise(const Model& model, const std::vector<double>& x_t,
                                  std::size_t t) {
  check_step_range(t, model.schedule);
  std::vector<double> input(x_t.size() + model.embed_dim);
  std::memcpy(input.data(), x_t.data(), x_t.size() * sizeof(double));
  const std::vector<double> embedding =
      time_embedding(static_cast<double>(t), model.embed_dim);
  std::memcpy(input.data() + x_t.size(), embedding.data(),
              model.embed_dim * sizeof(double));
  return forward_one(model.predictor, input.data());
}

std::vector<double> reverse_step(const std::vector<double>& x_t, std::size_t t,
                                 const Model& model, const std::vector<double>& z) {
  check_step_range(t, model.schedule);
  if (z.size() != x_t.size()) throw InputError("noise dimension mismatch");

  const std::vector<double> eps_hat = predict_noise(model, x_t, t);
  const double alpha = model.schedule.alpha[t - 1];
  const double alpha_bar = model.schedule.alpha_bar[t - 1];
  const double beta = model.schedule.beta[t - 1];
  const double sigma = std::sqrt(model.schedule.posterior_variance[t - 1]);
  const double inv_sqrt_alpha = 1.0 / std::sqrt(alpha);
  const double noise_scale = beta / std::sqrt(1.0 - alpha_bar);

  std::vector<double> x_prev(x_t.size());
  for (std::size_t i = 0; i < x_t.size(); ++i) {
    double v = inv_sqrt_alpha * (x_t[i] - noise_scale * eps_hat[i]) + sigma * z[i];
    x_prev[i] = std::clamp(v, -kStateBound, kStateBound);
  }
  return x_prev;
}

SimpleEventLog generate(const Model& model, std::int64_t count, Rng& rng) {
  if (count < 0) throw InputError("sample count must be non-negative");
  SimpleEventLog log;
  if (count == 0) return log;
  if (model.predictor.empty()) throw InputError("model has no trained predictor");
  const std::size_t n = model.vocab.size();
  const std::size_t steps = model.schedule.steps();

  // Advance the caller's stream so successive calls draw fresh samples.
  Rng base = rng.fork(rng.next_u64());
  std::vector<std::size_t> columns(static_cast<std::size_t>(count));
#pragma omp parallel for schedule(static)
  for (std::int64_t s = 0; s < count; ++s) {
    Rng sample_rng = base.fork(static_cast<std::uint64_t>(s));
    std::vector<double> x = sample_rng.gaussian_vector(n);
    const std::vector<double> zero(n, 0.0);
    for (std::size_t t = steps; t >= 1; --t) {
      const std::vector<double> z =
          (t > 1) ? sample_rng.gaussian_vector(n) : zero;
      x = reverse_step(x, t, model, z);
    }
    columns[static_cast<std::size_t>(s)] = decode_row_index(x.data(), n);
  }
  for (std::size_t column : columns) {
    log.add(model.vocab.variant_at(column));
  }
  return log;
}

}  // namespace logveil::ddpm
