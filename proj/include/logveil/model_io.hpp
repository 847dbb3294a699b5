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

#ifndef LOGVEIL_MODEL_IO_HPP_
#define LOGVEIL_MODEL_IO_HPP_

#include <string>

#include <json.hpp>

#include "logveil/ddpm.hpp"
#include "logveil/dp_sgd.hpp"
#include "logveil/encoding.hpp"
#include "logveil/nn.hpp"
#include "logveil/travag.hpp"

namespace logveil {

inline constexpr int kModelFormatVersion = 1;

nlohmann::json network_to_json(const DenseNetwork& net);
DenseNetwork network_from_json(const nlohmann::json& j);

nlohmann::json vocabulary_to_json(const VariantVocabulary& vocab);
VariantVocabulary vocabulary_from_json(const nlohmann::json& j);

// DP optimizer settings; keys clip_norm, noise_multiplier, sampling_rate,
// microbatch_size, learning_rate, iterations, seed. Absent keys keep the
// value already present in `base`.
DpSgdConfig dp_sgd_config_from_json(const nlohmann::json& j, DpSgdConfig base = {});
nlohmann::json dp_sgd_config_to_json(const DpSgdConfig& config);

// Shipped bundles. The published model carries only what sampling needs:
// the decoder and generator for the GAN pipeline (never the encoder or
// discriminator), or the schedule and predictor for the diffusion pipeline,
// plus the vocabulary and the consumed budget.
void save_travag_model(const travag::Model& model, const std::string& path);
void save_ddpm_model(const ddpm::Model& model, const std::string& path);

enum class EngineKind { travag, ddpm };

// Peeks at a model file to find which engine wrote it.
EngineKind model_engine(const std::string& path);

travag::Model load_travag_model(const std::string& path);
ddpm::Model load_ddpm_model(const std::string& path);

}  // namespace logveil

#endif  // LOGVEIL_MODEL_IO_HPP_
