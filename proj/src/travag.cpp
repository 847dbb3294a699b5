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

#include "logveil/travag.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <iostream>
#include <limits>

#include "logveil/error.hpp"

namespace logveil::travag {
namespace {

constexpr std::uint64_t kInitStreamBase = 1'000'000'000ULL;
constexpr const char* kDivergedMessage =
    "training diverged: reduce the learning rate or raise the noise multiplier";

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

std::size_t expected_batch_size(double sampling_rate, std::size_t dataset_size) {
  const double expected = sampling_rate * static_cast<double>(dataset_size);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(expected)));
}

}  // namespace

std::size_t Config::resolved_latent_dim(std::size_t n) const {
  if (latent_dim != 0) return latent_dim;
  const std::size_t preferred =
      std::min<std::size_t>(32, std::max<std::size_t>(2, n / 8));
  // keep the bottleneck strictly below n whenever n allows it
  return std::min(preferred, std::max<std::size_t>(1, n - 1));
}

void calibrate(Config& config, const PrivacySpec& target) {
  target.validate();
  const PrivacySpec half{target.epsilon / 2.0, target.delta / 2.0};
  config.decoder_dp.noise_multiplier =
      calibrate_noise(half, config.decoder_dp.sampling_rate,
                      config.decoder_dp.iterations)
          .noise_multiplier;
  config.decoder_delta = half.delta;
  config.discriminator_dp.noise_multiplier =
      calibrate_noise(half, config.discriminator_dp.sampling_rate,
                      config.discriminator_dp.iterations)
          .noise_multiplier;
  config.discriminator_delta = half.delta;
}

std::pair<AutoencoderPair, PrivacySpec> train_autoencoder(const Matrix& one_hot,
                                                          const Config& config) {
  if (one_hot.rows == 0 || one_hot.cols == 0) throw InputError("empty training matrix");
  config.decoder_dp.validate();
  const std::size_t n = one_hot.cols;
  const std::size_t d = config.resolved_latent_dim(n);
  if (d >= n && n > 1) throw InputError("latent dimension must be below input dimension");

  Rng master(config.decoder_dp.seed);
  Rng enc_init = master.fork(kInitStreamBase);
  Rng dec_init = master.fork(kInitStreamBase + 1);

  AutoencoderPair pair;
  pair.latent_dim = d;
  pair.encoder = config.autoencoder_hidden > 0
                     ? make_network({n, config.autoencoder_hidden, d},
                                    {Activation::relu, Activation::tanh}, enc_init)
                     : make_network({n, d}, {Activation::tanh}, enc_init);
  pair.decoder = config.autoencoder_hidden > 0
                     ? make_network({d, config.autoencoder_hidden, n},
                                    {Activation::relu, Activation::sigmoid}, dec_init)
                     : make_network({d, n}, {Activation::sigmoid}, dec_init);

  AccountantState accountant(config.decoder_dp.sampling_rate,
                             config.decoder_dp.noise_multiplier);
  const std::size_t param_count = pair.decoder.parameter_count();

  for (std::size_t step = 0; step < config.decoder_dp.iterations; ++step) {
    Rng step_rng = master.fork(step);
    const std::vector<std::size_t> batch =
        poisson_sample(one_hot.rows, config.decoder_dp.sampling_rate, step_rng);
    accountant.record_steps(1);
    if (batch.size() / config.decoder_dp.microbatch_size == 0) continue;

    Matrix decoder_grads(batch.size(), param_count);
    Matrix encoder_grads(batch.size(), pair.encoder.parameter_count());
    const std::int64_t b = static_cast<std::int64_t>(batch.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < b; ++k) {
      const double* x = one_hot.row(batch[k]);
      const std::vector<double> latent = forward_one(pair.encoder, x);
      const std::vector<double> recon = forward_one(pair.decoder, latent.data());
      std::vector<double> output_grad(n);
      const double inv_n = 1.0 / static_cast<double>(n);
      for (std::size_t j = 0; j < n; ++j) {
        output_grad[j] = 2.0 * (recon[j] - x[j]) * inv_n;
      }
      BackpropResult dec_bp =
          backprop_example(pair.decoder, latent.data(), output_grad);
      BackpropResult enc_bp = backprop_example(pair.encoder, x, dec_bp.input_grad);
      std::memcpy(decoder_grads.row(k), dec_bp.param_grad.data(),
                  param_count * sizeof(double));
      std::memcpy(encoder_grads.row(k), enc_bp.param_grad.data(),
                  enc_bp.param_grad.size() * sizeof(double));
    }

    // Both updates are computed from the pre-step parameters; only the
    // decoder's update carries clipping and noise.
    std::vector<double> decoder_update;
    try {
      decoder_update = microbatch_gradient(
          decoder_grads, config.decoder_dp.microbatch_size, config.decoder_dp.clip_norm,
          config.decoder_dp.noise_multiplier, step_rng);
    } catch (const InputError&) {
      throw DivergenceError(kDivergedMessage);
    }
    std::vector<double> encoder_update(encoder_grads.cols, 0.0);
    for (std::size_t i = 0; i < encoder_grads.rows; ++i) {
      const double* row = encoder_grads.row(i);
      for (std::size_t j = 0; j < encoder_grads.cols; ++j) encoder_update[j] += row[j];
    }
    const double inv_b = 1.0 / static_cast<double>(encoder_grads.rows);
    for (double& v : encoder_update) v *= inv_b;

    apply_update(pair.decoder, decoder_update, config.decoder_dp.learning_rate);
    apply_update(pair.encoder, encoder_update, config.encoder_learning_rate);
    check_finite_parameters(pair.decoder);
    check_finite_parameters(pair.encoder);
  }

  PrivacySpec spec;
  if (config.decoder_dp.noise_multiplier > 0.0) {
    spec = accountant.spec_for_delta(config.decoder_delta);
  } else {
    spec = {std::numeric_limits<double>::infinity(), config.decoder_delta};
  }
  return {std::move(pair), spec};
}

std::pair<GanPair, PrivacySpec> train_gan(const Matrix& one_hot,
                                          const AutoencoderPair& autoencoder,
                                          const Config& config) {
  if (one_hot.rows == 0 || one_hot.cols == 0) throw InputError("empty training matrix");
  config.discriminator_dp.validate();
  const std::size_t n = one_hot.cols;
  const std::size_t d = autoencoder.latent_dim;

  Rng master(config.discriminator_dp.seed);
  Rng gen_init = master.fork(kInitStreamBase);
  Rng dis_init = master.fork(kInitStreamBase + 1);

  GanPair gan;
  gan.noise_dim = config.noise_dim;
  // Init gain 2 spreads the initial fake distribution across the whole
  // latent box, so every data basin sees fakes from the first step.
  gan.generator =
      config.generator_hidden > 0
          ? make_network({config.noise_dim, config.generator_hidden, d},
                         {Activation::tanh, Activation::linear}, gen_init, 2.0)
          : make_network({config.noise_dim, d}, {Activation::linear}, gen_init, 2.0);
  gan.discriminator =
      config.discriminator_hidden > 0
          ? make_network({n, config.discriminator_hidden, 1},
                         {Activation::relu, Activation::sigmoid}, dis_init)
          : make_network({n, 1}, {Activation::sigmoid}, dis_init);

  AccountantState accountant(config.discriminator_dp.sampling_rate,
                             config.discriminator_dp.noise_multiplier);
  const std::size_t gen_batch =
      expected_batch_size(config.discriminator_dp.sampling_rate, one_hot.rows);

  std::size_t collapsed_steps = 0;
  bool collapse_warned = false;

  for (std::size_t step = 0; step < config.discriminator_dp.iterations; ++step) {
    // Discriminator step (DP-SGD). One fresh fake is paired with each
    // sampled real row; the pair forms one clipping unit.
    Rng dis_rng = master.fork(2 * step);
    const std::vector<std::size_t> batch =
        poisson_sample(one_hot.rows, config.discriminator_dp.sampling_rate, dis_rng);
    accountant.record_steps(1);

    if (batch.size() / config.discriminator_dp.microbatch_size > 0) {
      std::vector<std::vector<double>> seeds(batch.size());
      for (auto& z : seeds) z = dis_rng.gaussian_vector(config.noise_dim);

      const Matrix reals = gather_rows(one_hot, batch);
      Matrix fakes(batch.size(), n);
      const std::int64_t b = static_cast<std::int64_t>(batch.size());
#pragma omp parallel for schedule(static)
      for (std::int64_t k = 0; k < b; ++k) {
        const std::vector<double> latent = forward_one(gan.generator, seeds[k].data());
        const std::vector<double> fake =
            forward_one(autoencoder.decoder, latent.data());
        std::memcpy(fakes.row(k), fake.data(), n * sizeof(double));
      }

      Matrix ones(batch.size(), 1);
      Matrix zeros(batch.size(), 1);
      for (std::size_t k = 0; k < batch.size(); ++k) ones(k, 0) = 1.0;
      const Matrix real_grads = per_example_gradients(
          gan.discriminator, Loss::binary_cross_entropy, reals, ones);
      const Matrix fake_grads = per_example_gradients(
          gan.discriminator, Loss::binary_cross_entropy, fakes, zeros);
      Matrix unit_grads(batch.size(), real_grads.cols);
      for (std::size_t i = 0; i < unit_grads.data.size(); ++i) {
        unit_grads.data[i] = real_grads.data[i] + fake_grads.data[i];
      }

      std::vector<double> update;
      try {
        update = microbatch_gradient(unit_grads, config.discriminator_dp.microbatch_size,
                                     config.discriminator_dp.clip_norm,
                                     config.discriminator_dp.noise_multiplier, dis_rng);
      } catch (const InputError&) {
        throw DivergenceError(kDivergedMessage);
      }
      apply_update(gan.discriminator, update, config.discriminator_dp.learning_rate);
      check_finite_parameters(gan.discriminator);
    }

    // Generator step (plain SGD, no data access).
    Rng gen_rng = master.fork(2 * step + 1);
    generator_step(gan, autoencoder.decoder, gen_batch,
                   config.generator_learning_rate, gen_rng);
    check_finite_parameters(gan.generator);

    // Mode-collapse heuristic: near-zero variance of the generator's latent
    // outputs for 100 consecutive steps is reported, not fatal.
    {
      Rng probe_rng = master.fork(kInitStreamBase + 2 + step);
      const std::size_t probes = 16;
      Matrix latents(probes, d);
      for (std::size_t i = 0; i < probes; ++i) {
        const std::vector<double> z = probe_rng.gaussian_vector(config.noise_dim);
        const std::vector<double> h = forward_one(gan.generator, z.data());
        std::memcpy(latents.row(i), h.data(), d * sizeof(double));
      }
      double variance = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < probes; ++i) mean += latents(i, j);
        mean /= probes;
        for (std::size_t i = 0; i < probes; ++i) {
          const double diff = latents(i, j) - mean;
          variance += diff * diff;
        }
      }
      variance /= static_cast<double>(probes * d);
      collapsed_steps = (variance < 1e-8) ? collapsed_steps + 1 : 0;
      if (collapsed_steps >= 100 && !collapse_warned) {
        std::cerr << "warning: generator output variance below 1e-8 for 100 "
                     "consecutive steps (possible mode collapse)\n";
        collapse_warned = true;
      }
    }
  }

  PrivacySpec spec;
  if (config.discriminator_dp.noise_multiplier > 0.0) {
    spec = accountant.spec_for_delta(config.discriminator_delta);
  } else {
    spec = {std::numeric_limits<double>::infinity(), config.discriminator_delta};
  }
  return {std::move(gan), spec};
}

void generator_step(GanPair& gan, const DenseNetwork& decoder,
                    std::size_t batch_size, double learning_rate, Rng& rng) {
  if (batch_size == 0) return;
  std::vector<std::vector<double>> seeds(batch_size);
  for (auto& z : seeds) z = rng.gaussian_vector(gan.noise_dim);

  const std::size_t param_count = gan.generator.parameter_count();
  Matrix grads(batch_size, param_count);
  const std::int64_t b = static_cast<std::int64_t>(batch_size);
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < b; ++k) {
    const std::vector<double> latent = forward_one(gan.generator, seeds[k].data());
    const std::vector<double> fake = forward_one(decoder, latent.data());
    const std::vector<double> score = forward_one(gan.discriminator, fake.data());

    // Non-saturating loss -log dis(dec(gen(z))).
    const double y = std::min(std::max(score[0], 1e-12), 1.0 - 1e-12);
    const std::vector<double> dis_out_grad = {(y - 1.0) / (y * (1.0 - y))};
    const BackpropResult dis_bp =
        backprop_example(gan.discriminator, fake.data(), dis_out_grad);
    const BackpropResult dec_bp =
        backprop_example(decoder, latent.data(), dis_bp.input_grad);
    const BackpropResult gen_bp =
        backprop_example(gan.generator, seeds[k].data(), dec_bp.input_grad);
    std::memcpy(grads.row(k), gen_bp.param_grad.data(), param_count * sizeof(double));
  }

  std::vector<double> mean(param_count, 0.0);
  for (std::size_t i = 0; i < grads.rows; ++i) {
    const double* row = grads.row(i);
    for (std::size_t j = 0; j < param_count; ++j) mean[j] += row[j];
  }
  for (double& v : mean) v /= static_cast<double>(batch_size);
  apply_update(gan.generator, mean, learning_rate);
}

Model train(const EncodedLog& encoded, const Config& config) {
  Rng master(config.seed);
  Config resolved = config;
  resolved.decoder_dp.seed = master.fork(1).seed();
  resolved.discriminator_dp.seed = master.fork(2).seed();

  Model model;
  model.vocab = encoded.vocab;
  model.original_cases = static_cast<std::int64_t>(encoded.one_hot.rows);

  auto [autoencoder, decoder_spec] = train_autoencoder(encoded.one_hot, resolved);
  model.autoencoder = std::move(autoencoder);
  model.decoder_privacy = decoder_spec;

  auto [gan, discriminator_spec] =
      train_gan(encoded.one_hot, model.autoencoder, resolved);
  model.gan = std::move(gan);
  model.discriminator_privacy = discriminator_spec;
  return model;
}

SimpleEventLog sample(const Model& model, std::int64_t count, Rng& rng) {
  if (count < 0) throw InputError("sample count must be non-negative");
  SimpleEventLog log;
  if (count == 0) return log;
  if (model.gan.generator.empty() || model.autoencoder.decoder.empty()) {
    throw InputError("model is missing generator or decoder");
  }

  // Advance the caller's stream so successive calls draw fresh samples.
  Rng base = rng.fork(rng.next_u64());
  std::vector<std::size_t> columns(static_cast<std::size_t>(count));
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < count; ++i) {
    Rng sample_rng = base.fork(static_cast<std::uint64_t>(i));
    const std::vector<double> z = sample_rng.gaussian_vector(model.gan.noise_dim);
    const std::vector<double> latent = forward_one(model.gan.generator, z.data());
    const std::vector<double> row =
        forward_one(model.autoencoder.decoder, latent.data());
    columns[static_cast<std::size_t>(i)] = decode_row_index(row.data(), row.size());
  }
  for (std::size_t column : columns) {
    log.add(model.vocab.variant_at(column));
  }
  return log;
}

PrivacySpec total_privacy(const Model& model) {
  std::vector<PrivacySpec> specs;
  if (model.decoder_privacy) specs.push_back(*model.decoder_privacy);
  if (model.discriminator_privacy) specs.push_back(*model.discriminator_privacy);
  if (specs.empty()) throw Error("no privacy budget recorded");
  const PrivacySpec total = compose_dp(specs, CompositionMode::sequential);
  if (!std::isfinite(total.epsilon)) throw Error("budget exhausted");
  return total;
}

}  // namespace logveil::travag
