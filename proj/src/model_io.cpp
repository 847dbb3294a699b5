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

#include "logveil/model_io.hpp"

#include <fstream>
#include <limits>

#include "logveil/error.hpp"

namespace logveil {
namespace {

using nlohmann::json;

json privacy_to_json(const PrivacySpec& spec) {
  json j;
  // Infinity (an unnoised training run) is not representable in JSON; null
  // stands in for it.
  if (std::isfinite(spec.epsilon)) {
    j["epsilon"] = spec.epsilon;
  } else {
    j["epsilon"] = nullptr;
  }
  j["delta"] = spec.delta;
  return j;
}

PrivacySpec privacy_from_json(const json& j) {
  PrivacySpec spec;
  spec.epsilon = j.at("epsilon").is_null()
                     ? std::numeric_limits<double>::infinity()
                     : j.at("epsilon").get<double>();
  spec.delta = j.at("delta").get<double>();
  return spec;
}

json load_model_json(const std::string& path, const char* expected_engine) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open model file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError("corrupt model file '" + path + "': " + e.what() +
                     " (expected format version " +
                     std::to_string(kModelFormatVersion) + ")");
  }
  if (!j.contains("format_version") || !j["format_version"].is_number_integer()) {
    throw InputError("corrupt model file '" + path +
                     "': missing format_version (expected " +
                     std::to_string(kModelFormatVersion) + ")");
  }
  const int version = j["format_version"].get<int>();
  if (version != kModelFormatVersion) {
    throw InputError("model file '" + path + "' has format version " +
                     std::to_string(version) + ", this build supports version " +
                     std::to_string(kModelFormatVersion));
  }
  if (expected_engine != nullptr && j.value("engine", "") != expected_engine) {
    throw InputError("model file '" + path + "' was written by engine '" +
                     j.value("engine", "?") + "'");
  }
  return j;
}

void write_json_file(const json& j, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw Error("failed to write '" + path + "'");
}

}  // namespace

json network_to_json(const DenseNetwork& net) {
  json layers = json::array();
  for (const Layer& layer : net.layers) {
    json jl;
    jl["activation"] = to_string(layer.activation);
    jl["out_dim"] = layer.weights.rows;
    jl["in_dim"] = layer.weights.cols;
    jl["weights"] = layer.weights.data;
    jl["bias"] = layer.bias;
    layers.push_back(std::move(jl));
  }
  return json{{"layers", std::move(layers)}};
}

DenseNetwork network_from_json(const json& j) {
  DenseNetwork net;
  for (const json& jl : j.at("layers")) {
    Layer layer;
    layer.activation = activation_from_string(jl.at("activation").get<std::string>());
    const std::size_t out_dim = jl.at("out_dim").get<std::size_t>();
    const std::size_t in_dim = jl.at("in_dim").get<std::size_t>();
    layer.weights = Matrix(out_dim, in_dim);
    const auto weights = jl.at("weights").get<std::vector<double>>();
    if (weights.size() != out_dim * in_dim) {
      throw InputError("layer weight count does not match its shape");
    }
    layer.weights.data = weights;
    layer.bias = jl.at("bias").get<std::vector<double>>();
    if (layer.bias.size() != out_dim) {
      throw InputError("layer bias count does not match its shape");
    }
    net.layers.push_back(std::move(layer));
  }
  return net;
}

json vocabulary_to_json(const VariantVocabulary& vocab) {
  json columns = json::array();
  for (const TraceVariant& variant : vocab.variants()) {
    columns.push_back(variant.activities);
  }
  return json{{"variants", std::move(columns)}};
}

VariantVocabulary vocabulary_from_json(const json& j) {
  std::vector<TraceVariant> ordered;
  for (const json& column : j.at("variants")) {
    TraceVariant variant;
    variant.activities = column.get<std::vector<std::string>>();
    ordered.push_back(std::move(variant));
  }
  return VariantVocabulary(std::move(ordered));
}

DpSgdConfig dp_sgd_config_from_json(const json& j, DpSgdConfig base) {
  DpSgdConfig config = base;
  config.clip_norm = j.value("clip_norm", config.clip_norm);
  config.noise_multiplier = j.value("noise_multiplier", config.noise_multiplier);
  config.sampling_rate = j.value("sampling_rate", config.sampling_rate);
  config.microbatch_size = j.value("microbatch_size", config.microbatch_size);
  config.learning_rate = j.value("learning_rate", config.learning_rate);
  config.iterations = j.value("iterations", config.iterations);
  config.seed = j.value("seed", config.seed);
  return config;
}

json dp_sgd_config_to_json(const DpSgdConfig& config) {
  return json{{"clip_norm", config.clip_norm},
              {"noise_multiplier", config.noise_multiplier},
              {"sampling_rate", config.sampling_rate},
              {"microbatch_size", config.microbatch_size},
              {"learning_rate", config.learning_rate},
              {"iterations", config.iterations},
              {"seed", config.seed}};
}

void save_travag_model(const travag::Model& model, const std::string& path) {
  json j;
  j["format_version"] = kModelFormatVersion;
  j["engine"] = "travag";
  j["vocab"] = vocabulary_to_json(model.vocab);
  j["decoder"] = network_to_json(model.autoencoder.decoder);
  j["generator"] = network_to_json(model.gan.generator);
  j["latent_dim"] = model.autoencoder.latent_dim;
  j["noise_dim"] = model.gan.noise_dim;
  j["original_cases"] = model.original_cases;
  if (model.decoder_privacy) {
    j["decoder_privacy"] = privacy_to_json(*model.decoder_privacy);
  }
  if (model.discriminator_privacy) {
    j["discriminator_privacy"] = privacy_to_json(*model.discriminator_privacy);
  }
  write_json_file(j, path);
}

void save_ddpm_model(const ddpm::Model& model, const std::string& path) {
  json j;
  j["format_version"] = kModelFormatVersion;
  j["engine"] = "ddpm";
  j["vocab"] = vocabulary_to_json(model.vocab);
  j["predictor"] = network_to_json(model.predictor);
  j["embed_dim"] = model.embed_dim;
  j["schedule"] = json{{"steps", model.schedule.steps()},
                       {"beta", model.schedule.beta}};
  j["original_cases"] = model.original_cases;
  if (model.privacy) j["privacy"] = privacy_to_json(*model.privacy);
  write_json_file(j, path);
}

EngineKind model_engine(const std::string& path) {
  const json j = load_model_json(path, nullptr);
  const std::string engine = j.value("engine", "");
  if (engine == "travag") return EngineKind::travag;
  if (engine == "ddpm") return EngineKind::ddpm;
  throw InputError("model file '" + path + "' names unknown engine '" + engine + "'");
}

travag::Model load_travag_model(const std::string& path) {
  const json j = load_model_json(path, "travag");
  travag::Model model;
  try {
    model.vocab = vocabulary_from_json(j.at("vocab"));
    model.autoencoder.decoder = network_from_json(j.at("decoder"));
    model.gan.generator = network_from_json(j.at("generator"));
    model.autoencoder.latent_dim = j.at("latent_dim").get<std::size_t>();
    model.gan.noise_dim = j.at("noise_dim").get<std::size_t>();
    model.original_cases = j.at("original_cases").get<std::int64_t>();
    if (j.contains("decoder_privacy")) {
      model.decoder_privacy = privacy_from_json(j.at("decoder_privacy"));
    }
    if (j.contains("discriminator_privacy")) {
      model.discriminator_privacy = privacy_from_json(j.at("discriminator_privacy"));
    }
  } catch (const json::exception& e) {
    throw InputError("corrupt model file '" + path + "': " + e.what() +
                     " (format version " + std::to_string(kModelFormatVersion) + ")");
  }
  return model;
}

ddpm::Model load_ddpm_model(const std::string& path) {
  const json j = load_model_json(path, "ddpm");
  ddpm::Model model;
  try {
    model.vocab = vocabulary_from_json(j.at("vocab"));
    model.predictor = network_from_json(j.at("predictor"));
    model.embed_dim = j.at("embed_dim").get<std::size_t>();
    const auto beta = j.at("schedule").at("beta").get<std::vector<double>>();
    if (beta.empty()) throw InputError("model schedule is empty");
    // Rebuild the derived schedule fields from the stored betas.
    model.schedule.beta = beta;
    model.schedule.alpha.resize(beta.size());
    model.schedule.alpha_bar.resize(beta.size());
    model.schedule.posterior_variance.resize(beta.size());
    double alpha_bar_prev = 1.0;
    for (std::size_t i = 0; i < beta.size(); ++i) {
      model.schedule.alpha[i] = 1.0 - beta[i];
      model.schedule.alpha_bar[i] = alpha_bar_prev * model.schedule.alpha[i];
      model.schedule.posterior_variance[i] =
          beta[i] * (1.0 - alpha_bar_prev) / (1.0 - model.schedule.alpha_bar[i]);
      alpha_bar_prev = model.schedule.alpha_bar[i];
    }
    model.original_cases = j.at("original_cases").get<std::int64_t>();
    if (j.contains("privacy")) model.privacy = privacy_from_json(j.at("privacy"));
  } catch (const json::exception& e) {
    throw InputError("corrupt model file '" + path + "': " + e.what() +
                     " (format version " + std::to_string(kModelFormatVersion) + ")");
  }
  return model;
}

}  // namespace logveil
