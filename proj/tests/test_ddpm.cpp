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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "logveil/ddpm.hpp"
#include "logveil/error.hpp"
#include "logveil/synth.hpp"

using namespace logveil;
using logveil::ddpm::NoiseSchedule;

namespace {

TraceVariant variant(std::initializer_list<const char*> activities) {
  TraceVariant v;
  for (const char* a : activities) v.activities.emplace_back(a);
  return v;
}

ddpm::Config tiny_config() {
  ddpm::Config config;
  config.embed_dim = 8;
  config.hidden = {16};
  config.schedule_steps = 12;
  config.beta_start = 1e-3;
  config.beta_end = 0.5;
  config.dp = {1.0, 0.0, 1.0, 1, 0.2, 300, 0};
  return config;
}

}  // namespace

TEST_CASE("linear schedule with hand-checked products") {
  const NoiseSchedule s = ddpm::build_schedule(4, 0.1, 0.4);
  REQUIRE(s.steps() == 4);
  CHECK(s.beta[0] == doctest::Approx(0.1));
  CHECK(s.beta[1] == doctest::Approx(0.2));
  CHECK(s.beta[2] == doctest::Approx(0.3));
  CHECK(s.beta[3] == doctest::Approx(0.4));
  CHECK(s.alpha_bar[3] == doctest::Approx(0.9 * 0.8 * 0.7 * 0.6));
}

TEST_CASE("single-step schedule base case") {
  const NoiseSchedule s = ddpm::build_schedule(1, 0.2, 0.2);
  CHECK(s.alpha_bar[0] == doctest::Approx(0.8));
  CHECK(s.posterior_variance[0] == 0.0);
}

TEST_CASE("schedule identities hold for the default schedule") {
  const NoiseSchedule s = ddpm::build_schedule(
      ddpm::kDefaultSteps, ddpm::kDefaultBetaStart, ddpm::kDefaultBetaEnd);
  REQUIRE(s.steps() == 300);
  CHECK(s.alpha_bar[299] < 1e-3);

  double prev = 1.0;
  for (std::size_t i = 0; i < s.steps(); ++i) {
    CHECK(s.beta[i] > 0.0);
    CHECK(s.beta[i] < 1.0);
    CHECK(s.alpha[i] == doctest::Approx(1.0 - s.beta[i]));
    CHECK(s.alpha_bar[i] == doctest::Approx(prev * s.alpha[i]));
    CHECK(s.alpha_bar[i] < prev);  // strictly decreasing
    CHECK(s.posterior_variance[i] >= 0.0);
    CHECK(s.posterior_variance[i] <= s.beta[i] + 1e-15);
    prev = s.alpha_bar[i];
  }
  CHECK(s.posterior_variance[0] == 0.0);
}

TEST_CASE("invalid schedules are rejected") {
  CHECK_THROWS_AS(ddpm::build_schedule(0, 0.1, 0.2), InputError);
  CHECK_THROWS_AS(ddpm::build_schedule(10, 0.0, 0.2), InputError);
  CHECK_THROWS_AS(ddpm::build_schedule(10, 0.3, 0.2), InputError);
  CHECK_THROWS_AS(ddpm::build_schedule(10, 0.1, 1.0), InputError);
}

TEST_CASE("forward sampling follows the closed form") {
  SUBCASE("alpha_bar = 1 keeps x0") {
    NoiseSchedule s;
    s.beta = {0.0};
    s.alpha = {1.0};
    s.alpha_bar = {1.0};
    s.posterior_variance = {0.0};
    const std::vector<double> x = ddpm::forward_sample({0.3, -0.7}, 1, {5.0, 5.0}, s);
    CHECK(x[0] == doctest::Approx(0.3));
    CHECK(x[1] == doctest::Approx(-0.7));
  }

  SUBCASE("alpha_bar near 0 returns the noise") {
    NoiseSchedule s;
    s.beta = {1e-12};
    s.alpha = {1.0};
    s.alpha_bar = {1e-12};
    s.posterior_variance = {0.0};
    const std::vector<double> x = ddpm::forward_sample({100.0, -100.0}, 1, {1.5, -2.5}, s);
    CHECK(x[0] == doctest::Approx(1.5).epsilon(1e-4));
    CHECK(x[1] == doctest::Approx(-2.5).epsilon(1e-4));
  }

  SUBCASE("hand case at alpha_bar = 0.25") {
    NoiseSchedule s;
    s.beta = {0.75};
    s.alpha = {0.25};
    s.alpha_bar = {0.25};
    s.posterior_variance = {0.0};
    const std::vector<double> x = ddpm::forward_sample({1.0, 0.0}, 1, {1.0, 1.0}, s);
    CHECK(x[0] == doctest::Approx(0.5 + std::sqrt(0.75)).epsilon(1e-12));
    CHECK(x[1] == doctest::Approx(std::sqrt(0.75)).epsilon(1e-12));
  }

  SUBCASE("step range is enforced") {
    const NoiseSchedule s = ddpm::build_schedule(5, 0.1, 0.2);
    CHECK_THROWS_AS(ddpm::forward_sample({1.0}, 0, {0.0}, s), InputError);
    CHECK_THROWS_AS(ddpm::forward_sample({1.0}, 6, {0.0}, s), InputError);
  }
}

TEST_CASE("iterated single steps match direct sampling in distribution") {
  // chain x_t = sqrt(1-beta_t) x_{t-1} + sqrt(beta_t) eps_t vs the closed
  // form, compared on mean and variance over many draws
  const NoiseSchedule s = ddpm::build_schedule(40, 1e-3, 0.3);
  const double x0 = 0.8;
  const std::size_t t = 25;
  const std::size_t draws = 10000;

  Rng rng(51);
  double chain_mean = 0.0, chain_sq = 0.0;
  for (std::size_t i = 0; i < draws; ++i) {
    double x = x0;
    for (std::size_t step = 1; step <= t; ++step) {
      x = std::sqrt(1.0 - s.beta[step - 1]) * x +
          std::sqrt(s.beta[step - 1]) * rng.gaussian();
    }
    chain_mean += x;
    chain_sq += x * x;
  }
  chain_mean /= draws;
  const double chain_var = chain_sq / draws - chain_mean * chain_mean;

  const double expected_mean = std::sqrt(s.alpha_bar[t - 1]) * x0;
  const double expected_var = 1.0 - s.alpha_bar[t - 1];
  CHECK(std::abs(chain_mean - expected_mean) <=
        4.0 * std::sqrt(expected_var / draws));
  CHECK(std::abs(chain_var - expected_var) <= 0.10 * expected_var);
}

TEST_CASE("uniform step sampling is unbiased across bins") {
  Rng rng(52);
  const std::size_t steps = 20;
  std::vector<std::size_t> bins(steps, 0);
  const std::size_t draws = 100000;
  for (std::size_t i = 0; i < draws; ++i) {
    ++bins[rng.uniform_index(steps)];
  }
  const double expected = static_cast<double>(draws) / steps;
  const double sigma = std::sqrt(expected * (1.0 - 1.0 / steps));
  for (std::size_t b = 0; b < steps; ++b) {
    CHECK(std::abs(static_cast<double>(bins[b]) - expected) <= 3.0 * sigma);
  }
}

TEST_CASE("reverse step matches the update formula") {
  SUBCASE("zero predictor and zero z is a pure rescale") {
    ddpm::Model model;
    model.schedule.beta = {0.04};
    model.schedule.alpha = {0.96};
    model.schedule.alpha_bar = {0.96};
    model.schedule.posterior_variance = {0.0};
    model.embed_dim = 2;
    Layer layer;
    layer.weights = Matrix(2, 4);  // zero weights and bias -> eps_hat = 0
    layer.bias.assign(2, 0.0);
    layer.activation = Activation::linear;
    model.predictor.layers = {layer};

    const std::vector<double> x = ddpm::reverse_step({1.0, -0.5}, 1, model, {0.0, 0.0});
    CHECK(x[0] == doctest::Approx(1.0 / std::sqrt(0.96)).epsilon(1e-12));
    CHECK(x[1] == doctest::Approx(-0.5 / std::sqrt(0.96)).epsilon(1e-12));
  }

  SUBCASE("hand case with a constant 0.5 predictor") {
    ddpm::Model model;
    model.schedule.beta = {0.04};
    model.schedule.alpha = {0.96};
    model.schedule.alpha_bar = {0.5};
    model.schedule.posterior_variance = {0.0};
    model.embed_dim = 2;
    Layer layer;
    layer.weights = Matrix(2, 4);
    layer.bias.assign(2, 0.5);
    layer.activation = Activation::linear;
    model.predictor.layers = {layer};

    const std::vector<double> x = ddpm::reverse_step({1.0, 1.0}, 1, model, {0.0, 0.0});
    const double expected = (1.0 - 0.04 / std::sqrt(0.5) * 0.5) / std::sqrt(0.96);
    CHECK(x[0] == doctest::Approx(expected).epsilon(1e-10));
    CHECK(x[1] == doctest::Approx(expected).epsilon(1e-10));
    CHECK(x[0] == doctest::Approx(0.9917533).epsilon(1e-6));
  }

  SUBCASE("t = 0 is out of range") {
    ddpm::Model model;
    model.schedule = ddpm::build_schedule(3, 0.1, 0.3);
    model.embed_dim = 2;
    Layer layer;
    layer.weights = Matrix(1, 3);
    layer.bias.assign(1, 0.0);
    layer.activation = Activation::linear;
    model.predictor.layers = {layer};
    CHECK_THROWS_AS(ddpm::reverse_step({1.0}, 0, model, {0.0}), InputError);
  }

  SUBCASE("small beta keeps the state almost unchanged") {
    ddpm::Model model;
    model.schedule.beta = {1e-6, 1e-6};
    model.schedule.alpha = {1.0 - 1e-6, 1.0 - 1e-6};
    model.schedule.alpha_bar = {1.0 - 1e-6, (1.0 - 1e-6) * (1.0 - 1e-6)};
    model.schedule.posterior_variance = {0.0, 5e-7};
    model.embed_dim = 2;
    Layer layer;
    layer.weights = Matrix(2, 4);
    layer.bias.assign(2, 0.3);
    layer.activation = Activation::linear;
    model.predictor.layers = {layer};
    const std::vector<double> x = ddpm::reverse_step({0.7, -0.7}, 2, model, {0.0, 0.0});
    CHECK(std::abs(x[0] - 0.7) < 1e-3);
    CHECK(std::abs(x[1] + 0.7) < 1e-3);
  }
}

TEST_CASE("training reduces the noise-prediction loss on a repeated row") {
  SimpleEventLog log;
  log.add(variant({"a", "b"}), 8);
  const EncodedLog encoded = one_hot_encode(log);
  ddpm::Config config = tiny_config();
  config.dp.iterations = 500;
  const NoiseSchedule schedule = ddpm::build_schedule(
      config.schedule_steps, config.beta_start, config.beta_end);

  // frozen evaluation set of (x_t, t, eps) triples
  Rng eval_rng(53);
  const std::size_t n = encoded.one_hot.cols;
  const std::size_t eval_count = 200;
  Matrix inputs(eval_count, n + config.embed_dim);
  Matrix targets(eval_count, n);
  for (std::size_t i = 0; i < eval_count; ++i) {
    const std::size_t t = eval_rng.uniform_index(schedule.steps()) + 1;
    const std::vector<double> noise = eval_rng.gaussian_vector(n);
    const std::vector<double> x0 = encoded.one_hot.row_vector(0);
    const std::vector<double> x_t = ddpm::forward_sample(x0, t, noise, schedule);
    const std::vector<double> embedding =
        time_embedding(static_cast<double>(t), config.embed_dim);
    for (std::size_t j = 0; j < n; ++j) inputs(i, j) = x_t[j];
    for (std::size_t j = 0; j < config.embed_dim; ++j) {
      inputs(i, n + j) = embedding[j];
    }
    for (std::size_t j = 0; j < n; ++j) targets(i, j) = noise[j];
  }

  ddpm::Config untrained_config = config;
  untrained_config.dp.iterations = 0;
  const ddpm::Model untrained = ddpm::train(encoded, schedule, untrained_config);
  const ddpm::Model trained = ddpm::train(encoded, schedule, config);

  const double before = batch_loss(untrained.predictor, Loss::mse, inputs, targets);
  const double after = batch_loss(trained.predictor, Loss::mse, inputs, targets);
  CHECK(after < before);
}

TEST_CASE("training is deterministic per seed") {
  SynthConfig sc;
  sc.cases = 30;
  sc.variant_count = 3;
  sc.seed = 54;
  const EncodedLog encoded = one_hot_encode(synth_log(sc));
  ddpm::Config config = tiny_config();
  config.dp.iterations = 50;
  config.dp.noise_multiplier = 1.5;
  const ddpm::Model a = ddpm::train(encoded, config);
  const ddpm::Model b = ddpm::train(encoded, config);
  CHECK(flatten_parameters(a.predictor) == flatten_parameters(b.predictor));
  Rng r1(1), r2(1);
  CHECK(ddpm::generate(a, 100, r1) == ddpm::generate(b, 100, r2));
}

TEST_CASE("degenerate single-variant model generates that variant only") {
  SimpleEventLog log;
  log.add(variant({"a", "b"}), 10);
  const EncodedLog encoded = one_hot_encode(log);
  ddpm::Config config = tiny_config();
  config.dp.iterations = 400;
  const ddpm::Model model = ddpm::train(encoded, config);

  Rng rng(55);
  const SimpleEventLog generated = ddpm::generate(model, 1000, rng);
  REQUIRE(generated.variants.size() == 1);
  CHECK(generated.variants.at(variant({"a", "b"})) == 1000);
}

TEST_CASE("generation stays inside the vocabulary") {
  SynthConfig sc;
  sc.cases = 50;
  sc.variant_count = 5;
  sc.seed = 56;
  const SimpleEventLog source = synth_log(sc);
  const EncodedLog encoded = one_hot_encode(source);
  ddpm::Config config = tiny_config();
  config.dp.iterations = 150;
  const ddpm::Model model = ddpm::train(encoded, config);

  Rng rng(57);
  const SimpleEventLog generated = ddpm::generate(model, 2000, rng);
  CHECK(generated.total_cases() == 2000);
  for (const auto& [v, f] : generated.variants) {
    CHECK(source.variants.count(v) == 1);
  }
  CHECK(ddpm::generate(model, 0, rng).empty());
}

TEST_CASE("privacy spec comes from the accountant") {
  SynthConfig sc;
  sc.cases = 30;
  sc.variant_count = 3;
  sc.seed = 58;
  const EncodedLog encoded = one_hot_encode(synth_log(sc));
  ddpm::Config config = tiny_config();
  config.dp.iterations = 80;
  config.dp.sampling_rate = 0.5;
  ddpm::calibrate(config, {1.0, 1e-3});
  const ddpm::Model model = ddpm::train(encoded, config);
  REQUIRE(model.privacy.has_value());
  CHECK(model.privacy->epsilon <= 1.0);
  CHECK(model.privacy->delta == doctest::Approx(1e-3));
}

TEST_CASE("runaway learning rates raise the divergence error") {
  SynthConfig sc;
  sc.cases = 20;
  sc.variant_count = 3;
  sc.seed = 59;
  const EncodedLog encoded = one_hot_encode(synth_log(sc));
  ddpm::Config config = tiny_config();
  config.dp.learning_rate = 1e200;  // linear head: loss and grads overflow
  config.dp.iterations = 20;
  CHECK_THROWS_AS(ddpm::train(encoded, config), DivergenceError);
}
