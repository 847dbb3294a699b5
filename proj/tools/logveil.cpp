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

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "logveil/accountant.hpp"
#include "logveil/ddpm.hpp"
#include "logveil/encoding.hpp"
#include "logveil/error.hpp"
#include "logveil/log.hpp"
#include "logveil/metrics.hpp"
#include "logveil/model_io.hpp"
#include "logveil/synth.hpp"
#include "logveil/travag.hpp"

namespace {

using logveil::CsvSchema;
using logveil::DpSgdConfig;
using logveil::EncodedLog;
using logveil::LogStats;
using logveil::PrivacySpec;
using logveil::Rng;
using logveil::SimpleEventLog;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInputError = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitDiverged = 4;

struct GlobalFlags {
  std::optional<std::uint64_t> seed;
  bool json_output = false;
  std::string config_path;
  std::string manifest_out;
};

std::uint64_t resolve_seed(const GlobalFlags& flags, const json& config) {
  if (flags.seed) return *flags.seed;
  if (config.contains("seed")) return config["seed"].get<std::uint64_t>();
  std::random_device rd;
  const std::uint64_t seed =
      (static_cast<std::uint64_t>(rd()) << 32) ^ static_cast<std::uint64_t>(rd());
  std::cerr << "note: no --seed given, using generated seed " << seed << "\n";
  return seed;
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw logveil::InputError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw logveil::InputError("invalid JSON in '" + path + "': " + e.what());
  }
  // A manifest from a previous run works as a config file.
  if (j.contains("config") && j["config"].is_object()) return j["config"];
  return j;
}

void write_manifest(const std::string& default_path, const GlobalFlags& flags,
                    const std::string& command, const json& config,
                    const json& achieved_privacy, double wall_clock_seconds,
                    const json& inputs, const json& outputs) {
  const std::string path =
      flags.manifest_out.empty() ? default_path : flags.manifest_out;
  if (path.empty()) return;
  json manifest;
  manifest["command"] = command;
  manifest["config"] = config;
  manifest["achieved_privacy"] = achieved_privacy;
  manifest["wall_clock_seconds"] = wall_clock_seconds;
  manifest["inputs"] = inputs;
  manifest["outputs"] = outputs;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw logveil::InputError("cannot write manifest '" + path + "'");
  out << manifest.dump(2) << '\n';
}

int display_percent(double ratio) {
  return static_cast<int>(std::floor(ratio * 100.0 + 1e-9));
}

json stats_to_json(const LogStats& stats) {
  return json{{"n_events", stats.n_events},
              {"n_cases", stats.n_cases},
              {"n_activities", stats.n_activities},
              {"n_variants", stats.n_variants},
              {"trace_uniqueness", stats.trace_uniqueness}};
}

void print_stats_table(const LogStats& stats) {
  std::printf("%-18s %12lld\n", "events", static_cast<long long>(stats.n_events));
  std::printf("%-18s %12lld\n", "cases", static_cast<long long>(stats.n_cases));
  std::printf("%-18s %12lld\n", "activities",
              static_cast<long long>(stats.n_activities));
  std::printf("%-18s %12lld\n", "variants",
              static_cast<long long>(stats.n_variants));
  std::printf("%-18s %11d%% (%lld/%lld)\n", "trace uniqueness",
              display_percent(stats.trace_uniqueness),
              static_cast<long long>(stats.n_variants),
              static_cast<long long>(stats.n_cases));
}

// ---------------------------------------------------------------------------
// engine configs <-> JSON

logveil::travag::Config travag_config_from_json(const json& j) {
  logveil::travag::Config c;
  c.latent_dim = j.value("latent_dim", c.latent_dim);
  c.noise_dim = j.value("noise_dim", c.noise_dim);
  c.autoencoder_hidden = j.value("autoencoder_hidden", c.autoencoder_hidden);
  c.generator_hidden = j.value("generator_hidden", c.generator_hidden);
  c.discriminator_hidden = j.value("discriminator_hidden", c.discriminator_hidden);
  c.encoder_learning_rate = j.value("encoder_learning_rate", c.encoder_learning_rate);
  c.generator_learning_rate =
      j.value("generator_learning_rate", c.generator_learning_rate);
  // CLI defaults tuned for desk-scale logs; every field is overridable.
  c.decoder_dp.sampling_rate = 0.1;
  c.decoder_dp.iterations = 1500;
  c.discriminator_dp.sampling_rate = 0.1;
  c.discriminator_dp.iterations = 1500;
  if (j.contains("decoder_dp")) {
    c.decoder_dp = logveil::dp_sgd_config_from_json(j["decoder_dp"], c.decoder_dp);
  }
  if (j.contains("discriminator_dp")) {
    c.discriminator_dp =
        logveil::dp_sgd_config_from_json(j["discriminator_dp"], c.discriminator_dp);
  }
  return c;
}

json travag_config_to_json(const logveil::travag::Config& c) {
  return json{{"latent_dim", c.latent_dim},
              {"noise_dim", c.noise_dim},
              {"autoencoder_hidden", c.autoencoder_hidden},
              {"generator_hidden", c.generator_hidden},
              {"discriminator_hidden", c.discriminator_hidden},
              {"encoder_learning_rate", c.encoder_learning_rate},
              {"generator_learning_rate", c.generator_learning_rate},
              {"decoder_dp", logveil::dp_sgd_config_to_json(c.decoder_dp)},
              {"discriminator_dp", logveil::dp_sgd_config_to_json(c.discriminator_dp)}};
}

logveil::ddpm::Config ddpm_config_from_json(const json& j) {
  logveil::ddpm::Config c;
  c.embed_dim = j.value("embed_dim", c.embed_dim);
  c.hidden = j.value("hidden", c.hidden);
  c.schedule_steps = j.value("schedule_steps", c.schedule_steps);
  c.beta_start = j.value("beta_start", c.beta_start);
  c.beta_end = j.value("beta_end", c.beta_end);
  c.dp.sampling_rate = 0.1;
  c.dp.iterations = 2000;
  if (j.contains("dp")) c.dp = logveil::dp_sgd_config_from_json(j["dp"], c.dp);
  return c;
}

json ddpm_config_to_json(const logveil::ddpm::Config& c) {
  return json{{"embed_dim", c.embed_dim},
              {"hidden", c.hidden},
              {"schedule_steps", c.schedule_steps},
              {"beta_start", c.beta_start},
              {"beta_end", c.beta_end},
              {"dp", logveil::dp_sgd_config_to_json(c.dp)}};
}

// ---------------------------------------------------------------------------
// subcommands

struct StatsArgs {
  std::string input;
  CsvSchema schema;
};

int cmd_stats(const StatsArgs& args, const GlobalFlags& flags) {
  const auto started = std::chrono::steady_clock::now();
  const SimpleEventLog log = logveil::read_log_file(args.input, args.schema);
  const LogStats stats = logveil::log_stats(log);
  if (flags.json_output) {
    std::cout << stats_to_json(stats).dump(2) << '\n';
  } else {
    print_stats_table(stats);
  }
  const double wall_clock =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  write_manifest("", flags, "stats", json{{"input", args.input}}, json::object(),
                 wall_clock, json{{"input", args.input}},
                 json{{"stats", stats_to_json(stats)}});
  return kExitOk;
}

struct CalibrateArgs {
  double epsilon = 0.0;
  double delta = 0.0;
  double sampling_rate = 0.0;
  std::size_t iterations = 0;
};

int cmd_calibrate(const CalibrateArgs& args, const GlobalFlags& flags) {
  const PrivacySpec target{args.epsilon, args.delta};
  target.validate();
  const logveil::NoiseCalibration calibration =
      logveil::calibrate_noise(target, args.sampling_rate, args.iterations);
  const json out{{"noise_multiplier", calibration.noise_multiplier},
                 {"achieved_epsilon", calibration.achieved_epsilon},
                 {"delta", args.delta},
                 {"optimal_alpha", calibration.order}};
  if (flags.json_output) {
    std::cout << out.dump(2) << '\n';
  } else {
    std::printf("noise multiplier : %.6f\n", calibration.noise_multiplier);
    std::printf("achieved epsilon : %.6f (target %.6f)\n",
                calibration.achieved_epsilon, args.epsilon);
    std::printf("delta            : %g\n", args.delta);
    std::printf("optimal alpha    : %g\n", calibration.order);
  }
  write_manifest("", flags, "calibrate",
                 json{{"epsilon", args.epsilon},
                      {"delta", args.delta},
                      {"sampling_rate", args.sampling_rate},
                      {"iterations", args.iterations}},
                 json{{"epsilon", calibration.achieved_epsilon},
                      {"delta", args.delta}},
                 0.0, json::object(), json{{"calibration", out}});
  return kExitOk;
}

struct AnonymizeArgs {
  std::string engine;  // "travag" | "ddpm"
  std::string input;
  std::string out;
  std::string model_out;
  double epsilon = 1.0;
  double delta = 1e-3;
  std::optional<std::int64_t> samples;
  std::optional<std::size_t> ddpm_steps;
  CsvSchema schema;
};

void print_budget_line(const char* label, const PrivacySpec& spec) {
  std::printf("%-22s epsilon %.6f  delta %g\n", label, spec.epsilon, spec.delta);
}

int cmd_anonymize(const AnonymizeArgs& args, const GlobalFlags& flags) {
  const auto started = std::chrono::steady_clock::now();
  const PrivacySpec target{args.epsilon, args.delta};
  target.validate();  // rejects delta >= 1 before any training

  const SimpleEventLog input_log = logveil::read_log_file(args.input, args.schema);
  const EncodedLog encoded = logveil::one_hot_encode(input_log);
  const std::int64_t original_cases = input_log.total_cases();
  const std::int64_t sample_count = args.samples.value_or(original_cases);
  if (sample_count < 0) throw logveil::InputError("--samples must be non-negative");

  const json file_config = load_config(flags.config_path);
  const std::uint64_t seed = resolve_seed(flags, file_config);

  SimpleEventLog anonymized;
  PrivacySpec achieved;
  json config_json;
  json achieved_json;

  if (args.engine == "travag") {
    logveil::travag::Config config = travag_config_from_json(file_config);
    config.seed = seed;
    logveil::travag::calibrate(config, target);
    const logveil::travag::Model model = logveil::travag::train(encoded, config);
    achieved = logveil::travag::total_privacy(model);

    Rng sample_rng = Rng(seed).fork(0xA11CE);
    anonymized = logveil::travag::sample(model, sample_count, sample_rng);
    logveil::save_travag_model(model, args.model_out);

    config_json = travag_config_to_json(config);
    achieved_json = json{
        {"epsilon", achieved.epsilon},
        {"delta", achieved.delta},
        {"decoder",
         {{"epsilon", model.decoder_privacy->epsilon},
          {"delta", model.decoder_privacy->delta}}},
        {"discriminator",
         {{"epsilon", model.discriminator_privacy->epsilon},
          {"delta", model.discriminator_privacy->delta}}}};
    if (!flags.json_output) {
      print_budget_line("decoder budget", *model.decoder_privacy);
      print_budget_line("discriminator budget", *model.discriminator_privacy);
    }
  } else if (args.engine == "ddpm") {
    logveil::ddpm::Config config = ddpm_config_from_json(file_config);
    if (args.ddpm_steps) config.schedule_steps = *args.ddpm_steps;
    config.dp.seed = seed;
    logveil::ddpm::calibrate(config, target);
    const logveil::ddpm::Model model = logveil::ddpm::train(encoded, config);
    achieved = *model.privacy;

    Rng sample_rng = Rng(seed).fork(0xA11CE);
    anonymized = logveil::ddpm::generate(model, sample_count, sample_rng);
    logveil::save_ddpm_model(model, args.model_out);

    config_json = ddpm_config_to_json(config);
    achieved_json = json{{"epsilon", achieved.epsilon}, {"delta", achieved.delta}};
  } else {
    throw logveil::InputError("unknown engine '" + args.engine + "'");
  }

  logveil::write_log_file(anonymized, args.out);

  const double wall_clock =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();

  config_json["engine"] = args.engine;
  config_json["epsilon"] = args.epsilon;
  config_json["delta"] = args.delta;
  config_json["samples"] = sample_count;
  config_json["seed"] = seed;

  write_manifest(args.out + ".manifest.json", flags, "anonymize", config_json,
                 achieved_json, wall_clock, json{{"input", args.input}},
                 json{{"log", args.out}, {"model", args.model_out}});

  if (flags.json_output) {
    json report{{"engine", args.engine},
                {"requested", {{"epsilon", args.epsilon}, {"delta", args.delta}}},
                {"achieved", achieved_json},
                {"samples", sample_count},
                {"seed", seed},
                {"wall_clock_seconds", wall_clock}};
    std::cout << report.dump(2) << '\n';
  } else {
    std::printf("requested budget       epsilon %.6f  delta %g\n", args.epsilon,
                args.delta);
    print_budget_line("achieved budget", achieved);
    std::printf("anonymized log         %s (%lld cases)\n", args.out.c_str(),
                static_cast<long long>(sample_count));
    std::printf("model bundle           %s\n", args.model_out.c_str());
  }
  if (achieved.epsilon > args.epsilon + 1e-12 || achieved.delta > args.delta + 1e-15) {
    throw logveil::Error("achieved budget exceeds the requested target");
  }
  return kExitOk;
}

struct SampleArgs {
  std::string model;
  std::string out;
  std::optional<std::int64_t> samples;
};

int cmd_sample(const SampleArgs& args, const GlobalFlags& flags) {
  const auto started = std::chrono::steady_clock::now();
  const json file_config = load_config(flags.config_path);
  const std::uint64_t seed = resolve_seed(flags, file_config);
  Rng rng = Rng(seed).fork(0xA11CE);

  SimpleEventLog sampled;
  json budget;
  std::int64_t count = 0;
  if (logveil::model_engine(args.model) == logveil::EngineKind::travag) {
    const logveil::travag::Model model = logveil::load_travag_model(args.model);
    count = args.samples.value_or(model.original_cases);
    sampled = logveil::travag::sample(model, count, rng);
    const PrivacySpec total = logveil::travag::total_privacy(model);
    budget = json{{"epsilon", total.epsilon}, {"delta", total.delta}};
  } else {
    const logveil::ddpm::Model model = logveil::load_ddpm_model(args.model);
    count = args.samples.value_or(model.original_cases);
    sampled = logveil::ddpm::generate(model, count, rng);
    if (model.privacy) {
      budget = json{{"epsilon", model.privacy->epsilon},
                    {"delta", model.privacy->delta}};
    }
  }
  logveil::write_log_file(sampled, args.out);

  const double wall_clock =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  const json config_json{{"model", args.model}, {"samples", count}, {"seed", seed}};
  write_manifest(args.out + ".manifest.json", flags, "sample", config_json, budget,
                 wall_clock, json{{"model", args.model}}, json{{"log", args.out}});

  if (flags.json_output) {
    std::cout << json{{"samples", count}, {"seed", seed}, {"budget", budget}}.dump(2)
              << '\n';
  } else {
    std::printf("sampled %lld cases into %s\n", static_cast<long long>(count),
                args.out.c_str());
    if (!budget.is_null() && budget.contains("epsilon") &&
        budget["epsilon"].is_number()) {
      std::printf("model budget (unchanged by sampling): epsilon %.6f  delta %g\n",
                  budget["epsilon"].get<double>(), budget["delta"].get<double>());
    }
  }
  return kExitOk;
}

struct EvaluateArgs {
  std::string original;
  std::string anonymized;
  CsvSchema schema;
};

int cmd_evaluate(const EvaluateArgs& args, const GlobalFlags& flags) {
  const SimpleEventLog original = logveil::read_log_file(args.original, args.schema);
  const SimpleEventLog anonymized =
      logveil::read_log_file(args.anonymized, args.schema);
  const double similarity = logveil::relative_log_similarity(original, anonymized);
  const double difference = logveil::absolute_log_difference(original, anonymized);
  const json metrics{{"relative_log_similarity", similarity},
                     {"absolute_log_difference", difference}};
  if (flags.json_output) {
    std::cout << metrics.dump(2) << '\n';
  } else {
    std::printf("%-26s %12.6f\n", "relative log similarity", similarity);
    std::printf("%-26s %12.1f\n", "absolute log difference", difference);
  }
  write_manifest("", flags, "evaluate",
                 json{{"original", args.original}, {"anonymized", args.anonymized}},
                 json::object(), 0.0,
                 json{{"original", args.original}, {"anonymized", args.anonymized}},
                 json{{"metrics", metrics}});
  return kExitOk;
}

struct SynthArgs {
  logveil::SynthConfig config;
  std::string out;
};

int cmd_synth(SynthArgs args, const GlobalFlags& flags) {
  const auto started = std::chrono::steady_clock::now();
  if (flags.seed) args.config.seed = *flags.seed;
  const SimpleEventLog log = logveil::synth_log(args.config);
  logveil::write_log_file(log, args.out);
  const double wall_clock =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  const json config_json{{"cases", args.config.cases},
                         {"variants", args.config.variant_count},
                         {"zipf_skew", args.config.zipf_skew},
                         {"min_length", args.config.min_length},
                         {"max_length", args.config.max_length},
                         {"alphabet", args.config.alphabet},
                         {"seed", args.config.seed}};
  write_manifest(args.out + ".manifest.json", flags, "synth", config_json,
                 json::object(), wall_clock, json::object(),
                 json{{"log", args.out}});
  if (!flags.json_output) {
    std::printf("wrote %lld cases over %zu variants to %s\n",
                static_cast<long long>(args.config.cases),
                args.config.variant_count, args.out.c_str());
  }
  return kExitOk;
}

void add_schema_options(CLI::App* cmd, CsvSchema& schema) {
  cmd->add_option("--case-column", schema.case_column, "case id column name");
  cmd->add_option("--activity-column", schema.activity_column,
                  "activity column name");
  cmd->add_option("--timestamp-column", schema.timestamp_column,
                  "timestamp column name");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"differentially private event-log anonymization toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags flags;
  std::uint64_t seed_value = 0;
  CLI::Option* seed_opt =
      app.add_option("--seed", seed_value, "master seed for all randomness");
  app.add_flag("--json", flags.json_output, "machine-readable output");
  app.add_option("--config", flags.config_path,
                 "JSON config file (a manifest from a previous run also works)");
  app.add_option("--manifest-out", flags.manifest_out, "manifest path override");

  StatsArgs stats_args;
  CLI::App* stats = app.add_subcommand("stats", "descriptive statistics of a log");
  stats->add_option("--input", stats_args.input, "event log CSV")->required();
  add_schema_options(stats, stats_args.schema);

  CalibrateArgs calibrate_args;
  CLI::App* calibrate =
      app.add_subcommand("calibrate", "noise multiplier for a privacy target");
  calibrate->add_option("--epsilon", calibrate_args.epsilon)->required();
  calibrate->add_option("--delta", calibrate_args.delta)->required();
  calibrate->add_option("--sampling-rate", calibrate_args.sampling_rate)->required();
  calibrate->add_option("--iterations", calibrate_args.iterations)->required();

  AnonymizeArgs anon_args;
  CLI::App* anonymize =
      app.add_subcommand("anonymize", "train a generative model and sample");
  anonymize->require_subcommand(1);
  anonymize->fallthrough();
  std::int64_t anon_samples = 0;
  std::size_t anon_steps = 0;
  CLI::Option* anon_samples_opt = nullptr;
  CLI::Option* anon_steps_opt = nullptr;
  for (const char* engine : {"travag", "ddpm"}) {
    CLI::App* sub = anonymize->add_subcommand(engine);
    sub->fallthrough();
    if (std::string(engine) == "ddpm") {
      anon_steps_opt = sub->add_option("--steps", anon_steps, "diffusion steps");
    }
  }
  anonymize->add_option("--input", anon_args.input, "event log CSV")->required();
  anonymize->add_option("--epsilon", anon_args.epsilon)->required();
  anonymize->add_option("--delta", anon_args.delta)->required();
  anonymize->add_option("--out", anon_args.out, "anonymized CSV path")->required();
  anonymize->add_option("--model-out", anon_args.model_out, "model bundle path")
      ->required();
  anon_samples_opt = anonymize->add_option(
      "--samples", anon_samples, "sample count (default: original case count)");
  add_schema_options(anonymize, anon_args.schema);

  SampleArgs sample_args;
  CLI::App* sample =
      app.add_subcommand("sample", "sample from a trained model bundle");
  sample->add_option("--model", sample_args.model, "model bundle")->required();
  sample->add_option("--out", sample_args.out, "output CSV")->required();
  std::int64_t sample_count = 0;
  CLI::Option* sample_count_opt = sample->add_option(
      "--samples", sample_count, "sample count (default: original case count)");

  EvaluateArgs eval_args;
  CLI::App* evaluate = app.add_subcommand("evaluate", "data-utility metrics");
  evaluate->add_option("--original", eval_args.original)->required();
  evaluate->add_option("--anonymized", eval_args.anonymized)->required();
  add_schema_options(evaluate, eval_args.schema);

  SynthArgs synth_args;
  CLI::App* synth = app.add_subcommand("synth", "seeded synthetic test log");
  synth->add_option("--cases", synth_args.config.cases);
  synth->add_option("--variants", synth_args.config.variant_count);
  synth->add_option("--zipf", synth_args.config.zipf_skew, "Zipf skew (0 = uniform)");
  synth->add_option("--min-length", synth_args.config.min_length);
  synth->add_option("--max-length", synth_args.config.max_length);
  synth->add_option("--alphabet", synth_args.config.alphabet);
  synth->add_option("--out", synth_args.out, "output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInputError;
  }

  if (seed_opt->count() > 0) flags.seed = seed_value;

  try {
    if (stats->parsed()) return cmd_stats(stats_args, flags);
    if (calibrate->parsed()) return cmd_calibrate(calibrate_args, flags);
    if (anonymize->parsed()) {
      anon_args.engine = anonymize->get_subcommands().front()->get_name();
      if (anon_samples_opt->count() > 0) anon_args.samples = anon_samples;
      if (anon_steps_opt != nullptr && anon_steps_opt->count() > 0) {
        anon_args.ddpm_steps = anon_steps;
      }
      return cmd_anonymize(anon_args, flags);
    }
    if (sample->parsed()) {
      if (sample_count_opt->count() > 0) sample_args.samples = sample_count;
      return cmd_sample(sample_args, flags);
    }
    if (evaluate->parsed()) return cmd_evaluate(eval_args, flags);
    if (synth->parsed()) return cmd_synth(synth_args, flags);
  } catch (const logveil::InfeasibleError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const logveil::DivergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDiverged;
  } catch (const logveil::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const logveil::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitOk;
}
