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

#include "logveil/encoding.hpp"
#include "logveil/error.hpp"
#include "logveil/rng.hpp"
#include "logveil/synth.hpp"

using namespace logveil;

namespace {

TraceVariant variant(std::initializer_list<const char*> activities) {
  TraceVariant v;
  for (const char* a : activities) v.activities.emplace_back(a);
  return v;
}

}  // namespace

TEST_CASE("encode builds one row per case with matching column sums") {
  SimpleEventLog log;
  log.add(variant({"a"}), 2);
  log.add(variant({"b"}), 1);
  const EncodedLog encoded = one_hot_encode(log);
  REQUIRE(encoded.one_hot.rows == 3);
  REQUIRE(encoded.one_hot.cols == 2);
  for (std::size_t i = 0; i < 3; ++i) {
    double row_sum = 0.0;
    for (std::size_t j = 0; j < 2; ++j) row_sum += encoded.one_hot(i, j);
    CHECK(row_sum == 1.0);
  }
  double col0 = 0.0, col1 = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    col0 += encoded.one_hot(i, 0);
    col1 += encoded.one_hot(i, 1);
  }
  // column 0 is the most frequent variant
  CHECK(col0 == 2.0);
  CHECK(col1 == 1.0);
  CHECK(encoded.vocab.variant_at(0) == variant({"a"}));
}

TEST_CASE("single-variant log encodes to a 1x1 matrix") {
  SimpleEventLog log;
  log.add(variant({"a"}));
  const EncodedLog encoded = one_hot_encode(log);
  REQUIRE(encoded.one_hot.rows == 1);
  REQUIRE(encoded.one_hot.cols == 1);
  CHECK(encoded.one_hot(0, 0) == 1.0);
}

TEST_CASE("vocabulary orders by frequency then lexicographic") {
  SimpleEventLog log;
  log.add(variant({"z"}), 5);
  log.add(variant({"a", "a"}), 2);
  log.add(variant({"a", "b"}), 2);
  const VariantVocabulary vocab = VariantVocabulary::from_log(log);
  CHECK(vocab.variant_at(0) == variant({"z"}));
  CHECK(vocab.variant_at(1) == variant({"a", "a"}));
  CHECK(vocab.variant_at(2) == variant({"a", "b"}));
  CHECK(vocab.column_of(variant({"a", "b"})) == 2);
  CHECK(!vocab.contains(variant({"c"})));
}

TEST_CASE("decode_row takes the argmax, ties to the lowest column") {
  SimpleEventLog log;
  log.add(variant({"a"}), 2);
  log.add(variant({"b"}), 1);
  const VariantVocabulary vocab = VariantVocabulary::from_log(log);

  CHECK(decode_row({0.2, 0.9}, vocab) == variant({"b"}));
  CHECK(decode_row({0.9, 0.2}, vocab) == variant({"a"}));
  CHECK(decode_row({0.5, 0.5}, vocab) == variant({"a"}));  // tie rule
}

TEST_CASE("non-finite rows are rejected") {
  SimpleEventLog log;
  log.add(variant({"a"}));
  log.add(variant({"b"}));
  const VariantVocabulary vocab = VariantVocabulary::from_log(log);
  CHECK_THROWS_WITH_AS(
      decode_row({std::numeric_limits<double>::quiet_NaN(), 0.0}, vocab),
      "non-finite generator output", InputError);
  CHECK_THROWS_AS(
      decode_row({std::numeric_limits<double>::infinity(), 0.0}, vocab),
      InputError);
}

TEST_CASE("decode is the inverse of encode") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SynthConfig config;
    config.cases = 30 + static_cast<std::int64_t>(seed % 50);
    config.variant_count = 1 + seed % 7;
    config.seed = seed + 100;
    const SimpleEventLog log = synth_log(config);
    const EncodedLog encoded = one_hot_encode(log);
    CHECK(one_hot_decode(encoded.one_hot, encoded.vocab) == log);
  }
}

TEST_CASE("random real-valued rows always decode into the vocabulary") {
  SynthConfig config;
  config.variant_count = 5;
  config.cases = 25;
  config.seed = 9;
  const SimpleEventLog log = synth_log(config);
  const VariantVocabulary vocab = VariantVocabulary::from_log(log);

  Rng rng(1234);
  Matrix rows(1000, vocab.size());
  for (double& v : rows.data) v = rng.uniform();
  const SimpleEventLog decoded = one_hot_decode(rows, vocab);
  CHECK(decoded.total_cases() == 1000);
  for (const auto& [v, freq] : decoded.variants) {
    CHECK(vocab.contains(v));
  }
}

TEST_CASE("empty row list decodes to an empty log") {
  SimpleEventLog log;
  log.add(variant({"a"}));
  const VariantVocabulary vocab = VariantVocabulary::from_log(log);
  CHECK(one_hot_decode(Matrix(0, 1), vocab).empty());
}

TEST_CASE("encoding preserves totals and per-variant frequencies") {
  SynthConfig config;
  config.cases = 120;
  config.variant_count = 6;
  config.seed = 77;
  const SimpleEventLog log = synth_log(config);
  const EncodedLog encoded = one_hot_encode(log);
  CHECK(static_cast<std::int64_t>(encoded.one_hot.rows) == log.total_cases());
  for (std::size_t j = 0; j < encoded.vocab.size(); ++j) {
    double column_sum = 0.0;
    for (std::size_t i = 0; i < encoded.one_hot.rows; ++i) {
      column_sum += encoded.one_hot(i, j);
    }
    CHECK(column_sum ==
          static_cast<double>(log.variants.at(encoded.vocab.variant_at(j))));
  }
}
