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

#ifndef LOGVEIL_TRAVAG_HPP_
#define LOGVEIL_TRAVAG_HPP_

#include <cstdint>
#include <optional>
#include <utility>

#include "logveil/accountant.hpp"
#include "logveil/dp_sgd.hpp"
#include "logveil/encoding.hpp"
#include "logveil/nn.hpp"

namespace logveil::travag {

// Two-stage pipeline: a compressing autoencoder whose decoder is trained
// with DP-SGD, then a GAN whose generator lives in the latent space and
// whose discriminator (the only other component that touches raw rows) is
// trained with DP-SGD. Encoder and generator take plain gradient steps.
struct Config {
  std::size_t latent_dim = 0;  // 0 -> min(32, max(2, n/8))
  std::size_t noise_dim = 64;  // generator seed dimension m_z
  std::size_t autoencoder_hidden = 128;
  std::size_t generator_hidden = 128;
  std::size_t discriminator_hidden = 128;

  DpSgdConfig decoder_dp;        // clipping/noise/q/eta/T for the decoder
  DpSgdConfig discriminator_dp;  // same for the discriminator
  double encoder_learning_rate = 1e-3;
  double generator_learning_rate = 1e-3;

  // Deltas used when converting each component's RDP account to (eps, delta).
  double decoder_delta = 1e-6;
  double discriminator_delta = 1e-6;

  std::uint64_t seed = 42;

  std::size_t resolved_latent_dim(std::size_t n) const;
};

struct AutoencoderPair {
  DenseNetwork encoder;  // R^n -> R^d, plain SGD
  DenseNetwork decoder;  // R^d -> R^n, DP-SGD only
  std::size_t latent_dim = 0;
};

struct GanPair {
  DenseNetwork generator;      // R^{m_z} -> R^d, plain SGD
  DenseNetwork discriminator;  // R^n -> (0, 1), DP-SGD only
  std::size_t noise_dim = 0;
};

struct Model {
  VariantVocabulary vocab;
  AutoencoderPair autoencoder;
  GanPair gan;
  std::optional<PrivacySpec> decoder_privacy;
  std::optional<PrivacySpec> discriminator_privacy;
  std::int64_t original_cases = 0;
};

// Sets both components' noise multipliers so the sequential composition of
// their budgets stays within the target (each component gets half of
// epsilon and half of delta).
void calibrate(Config& config, const PrivacySpec& target);

// Joint autoencoder training; plain steps for the encoder, DP-SGD for the
// decoder. The returned spec covers the decoder's steps only.
std::pair<AutoencoderPair, PrivacySpec> train_autoencoder(const Matrix& one_hot,
                                                          const Config& config);

// Alternating GAN training; the returned spec covers discriminator steps.
std::pair<GanPair, PrivacySpec> train_gan(const Matrix& one_hot,
                                          const AutoencoderPair& autoencoder,
                                          const Config& config);

// One plain gradient step for the generator. Takes no data on purpose: the
// generator's gradient flows only through dec(gen(z)) and the discriminator.
void generator_step(GanPair& gan, const DenseNetwork& decoder,
                    std::size_t batch_size, double learning_rate, Rng& rng);

// Full pipeline; sub-seeds are derived from config.seed.
Model train(const EncodedLog& encoded, const Config& config);

// count draws of z ~ N(0, I), decoded through dec(gen(z)) and the argmax
// rule; never emits a variant outside the vocabulary.
SimpleEventLog sample(const Model& model, std::int64_t count, Rng& rng);

// Sequential composition of the recorded component budgets.
PrivacySpec total_privacy(const Model& model);

}  // namespace logveil::travag

#endif  // LOGVEIL_TRAVAG_HPP_
