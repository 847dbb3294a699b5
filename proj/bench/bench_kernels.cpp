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
//
// OpenMP kernels vs their serial references. Run with OMP_NUM_THREADS set
// to taste; on one hardware thread the pairs should be close.

#include <benchmark/benchmark.h>

#include "logveil/metrics.hpp"
#include "logveil/nn.hpp"
#include "logveil/rng.hpp"

namespace {

using namespace logveil;

struct GradFixture {
  DenseNetwork net;
  Matrix batch;
  Matrix targets;

  GradFixture() {
    Rng init(1);
    net = make_network({64, 128, 64}, {Activation::relu, Activation::sigmoid}, init);
    Rng fill(2);
    batch = Matrix(256, 64);
    targets = Matrix(256, 64);
    for (double& v : batch.data) v = fill.gaussian();
    for (double& v : targets.data) v = fill.uniform();
  }
};

const GradFixture& grad_fixture() {
  static const GradFixture fixture;
  return fixture;
}

void BM_PerExampleGradientsSerial(benchmark::State& state) {
  const GradFixture& f = grad_fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        per_example_gradients_serial(f.net, Loss::mse, f.batch, f.targets));
  }
}
BENCHMARK(BM_PerExampleGradientsSerial)->Unit(benchmark::kMillisecond);

void BM_PerExampleGradientsParallel(benchmark::State& state) {
  const GradFixture& f = grad_fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        per_example_gradients(f.net, Loss::mse, f.batch, f.targets));
  }
}
BENCHMARK(BM_PerExampleGradientsParallel)->Unit(benchmark::kMillisecond);

std::vector<TraceVariant> bench_variants(std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<TraceVariant> variants(count);
  for (TraceVariant& v : variants) {
    const std::size_t len = 4 + rng.uniform_index(8);
    for (std::size_t i = 0; i < len; ++i) {
      v.activities.push_back(std::string(1, static_cast<char>('a' + rng.uniform_index(10))));
    }
  }
  return variants;
}

void BM_LevenshteinMatrixSerial(benchmark::State& state) {
  static const auto a = bench_variants(150, 3);
  static const auto b = bench_variants(150, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(levenshtein_cost_matrix_serial(a, b, true));
  }
}
BENCHMARK(BM_LevenshteinMatrixSerial)->Unit(benchmark::kMillisecond);

void BM_LevenshteinMatrixParallel(benchmark::State& state) {
  static const auto a = bench_variants(150, 3);
  static const auto b = bench_variants(150, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(levenshtein_cost_matrix(a, b, true));
  }
}
BENCHMARK(BM_LevenshteinMatrixParallel)->Unit(benchmark::kMillisecond);

void BM_ForwardBatch(benchmark::State& state) {
  const GradFixture& f = grad_fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(forward(f.net, f.batch));
  }
}
BENCHMARK(BM_ForwardBatch)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
