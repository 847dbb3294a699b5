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

#include <algorithm>
#include <sstream>

#include "logveil/error.hpp"
#include "logveil/log.hpp"
#include "logveil/synth.hpp"

using namespace logveil;

namespace {

SimpleEventLog ingest(const std::string& csv, const CsvSchema& schema = {}) {
  std::istringstream in(csv);
  return ingest_csv(in, schema);
}

TraceVariant variant(std::initializer_list<const char*> activities) {
  TraceVariant v;
  for (const char* a : activities) v.activities.emplace_back(a);
  return v;
}

}  // namespace

TEST_CASE("single case groups into one variant") {
  const auto log = ingest(
      "case_id,activity,timestamp\n"
      "c1,a,2020-01-01T00:00:00\n"
      "c1,b,2020-01-01T00:00:01\n");
  REQUIRE(log.variants.size() == 1);
  CHECK(log.variants.at(variant({"a", "b"})) == 1);
}

TEST_CASE("timestamp order wins over file order") {
  const auto log = ingest(
      "case_id,activity,timestamp\n"
      "c1,a,2020-01-01T00:00:02\n"
      "c1,b,2020-01-01T00:00:01\n");
  CHECK(log.variants.at(variant({"b", "a"})) == 1);
}

TEST_CASE("equal timestamps keep file order") {
  const auto log = ingest(
      "case_id,activity,timestamp\n"
      "c1,x,2020-01-01T00:00:01\n"
      "c1,y,2020-01-01T00:00:01\n");
  CHECK(log.variants.at(variant({"x", "y"})) == 1);
}

TEST_CASE("four cases group into two variants") {
  const auto log = ingest(
      "case_id,activity,timestamp\n"
      "c1,a,1\nc1,b,2\n"
      "c2,a,1\nc2,b,2\n"
      "c3,a,1\nc3,c,2\n"
      "c4,a,1\nc4,c,2\n");
  REQUIRE(log.variants.size() == 2);
  CHECK(log.variants.at(variant({"a", "b"})) == 2);
  CHECK(log.variants.at(variant({"a", "c"})) == 2);
}

TEST_CASE("duplicate rows are kept, not deduplicated") {
  const auto log = ingest(
      "case_id,activity,timestamp\n"
      "c1,a,1\nc1,a,1\n");
  CHECK(log.variants.at(variant({"a", "a"})) == 1);
}

TEST_CASE("malformed rows name the line") {
  CHECK_THROWS_WITH_AS(ingest("case_id,activity,timestamp\nc1,a\n"),
                       doctest::Contains("line 2"), InputError);
  CHECK_THROWS_WITH_AS(
      ingest("case_id,activity,timestamp\nc1,a,1\nc2,b,not-a-time\n"),
      doctest::Contains("line 3"), InputError);
  CHECK_THROWS_WITH_AS(ingest("case_id,activity,timestamp\n,a,1\n"),
                       doctest::Contains("empty case id"), InputError);
}

TEST_CASE("missing schema column is reported") {
  CHECK_THROWS_WITH_AS(ingest("case,act,ts\nc1,a,1\n"),
                       doctest::Contains("case_id"), InputError);
}

TEST_CASE("custom schema names") {
  CsvSchema schema{"Case ID", "Activity", "Complete Timestamp"};
  const auto log = ingest(
      "Case ID,Activity,Complete Timestamp\n"
      "c1,a,2020-03-04 10:00:00\n",
      schema);
  CHECK(log.variants.at(variant({"a"})) == 1);
}

TEST_CASE("quoted fields with commas and quotes round-trip") {
  SimpleEventLog log;
  log.add(variant({"hello, world", "say \"hi\"", "plain"}), 2);
  std::ostringstream out;
  write_csv(log, out);
  std::istringstream in(out.str());
  CHECK(ingest_csv(in) == log);
}

TEST_CASE("timestamp parsing") {
  CHECK(parse_timestamp("1970-01-01T00:00:00") == 0.0);
  CHECK(parse_timestamp("1970-01-01T00:00:05") == 5.0);
  CHECK(parse_timestamp("1970-01-02") == 86400.0);
  CHECK(parse_timestamp("1970-01-01 01:00:00+01:00") == 0.0);
  CHECK(parse_timestamp("1970-01-01T00:00:00.5Z") == 0.5);
  CHECK(parse_timestamp("42") == 42.0);
  CHECK(parse_timestamp("1969-12-31T23:59:59") == -1.0);
  CHECK(parse_timestamp("2020-02-29T00:00:00") > 0.0);  // leap day parses
  CHECK_THROWS_AS(parse_timestamp("2019-02-29T00:00:00"), InputError);
  CHECK_THROWS_AS(parse_timestamp("yesterday"), InputError);
  CHECK_THROWS_AS(parse_timestamp(""), InputError);
}

TEST_CASE("log_stats on tiny logs") {
  SimpleEventLog single;
  single.add(variant({"a"}));
  LogStats stats = log_stats(single);
  CHECK(stats.n_events == 1);
  CHECK(stats.n_cases == 1);
  CHECK(stats.n_activities == 1);
  CHECK(stats.n_variants == 1);
  CHECK(stats.trace_uniqueness == 1.0);

  SimpleEventLog mixed;
  mixed.add(variant({"a", "b"}), 3);
  mixed.add(variant({"a"}), 1);
  stats = log_stats(mixed);
  CHECK(stats.n_events == 7);
  CHECK(stats.n_cases == 4);
  CHECK(stats.n_activities == 2);
  CHECK(stats.n_variants == 2);
  CHECK(stats.trace_uniqueness == 0.5);
}

TEST_CASE("empty log is rejected") {
  CHECK_THROWS_WITH_AS(log_stats(SimpleEventLog{}), "empty log", InputError);
}

TEST_CASE("write_csv emits one row per event") {
  SimpleEventLog log;
  log.add(variant({"a"}));
  std::ostringstream out;
  write_csv(log, out);
  CHECK(out.str() == "case_id,activity,timestamp\ncase_1,a,1970-01-01T00:00:00\n");

  SimpleEventLog two;
  two.add(variant({"a", "b"}), 2);
  std::ostringstream out2;
  write_csv(two, out2);
  std::size_t rows = 0;
  for (char c : out2.str()) rows += c == '\n';
  CHECK(rows == 5);  // header + 2 cases x 2 events
}

TEST_CASE("round trip over random synthetic logs") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    SynthConfig config;
    config.cases = 20 + static_cast<std::int64_t>(seed * 13 % 100);
    config.variant_count = 1 + seed % 8;
    config.zipf_skew = (seed % 3) * 0.7;
    config.seed = seed;
    const SimpleEventLog log = synth_log(config);

    std::ostringstream out;
    write_csv(log, out);
    std::istringstream in(out.str());
    const SimpleEventLog back = ingest_csv(in);
    REQUIRE(back == log);

    const LogStats stats = log_stats(log);
    CHECK(stats.n_variants <= stats.n_cases);
  }
}

TEST_CASE("synthetic Zipf apportionment is deterministic") {
  SynthConfig config;
  config.cases = 500;
  config.variant_count = 5;
  config.zipf_skew = 1.0;
  config.seed = 7;
  const SimpleEventLog log = synth_log(config);
  // largest-remainder apportionment of 495 spare cases over harmonic
  // weights after one guaranteed case per variant: 218, 110, 73, 55, 44
  std::vector<std::int64_t> counts;
  for (const auto& [v, f] : log.variants) counts.push_back(f);
  std::sort(counts.begin(), counts.end(), std::greater<>());
  CHECK(counts == std::vector<std::int64_t>{218, 110, 73, 55, 44});
  CHECK(log == synth_log(config));  // seeded determinism

  SynthConfig uniform = config;
  uniform.zipf_skew = 0.0;
  const SimpleEventLog flat = synth_log(uniform);
  for (const auto& [v, f] : flat.variants) CHECK(f == 100);
}

TEST_CASE("row order does not matter when timestamps are kept") {
  const char* rows[] = {"c1,a,3", "c1,b,5", "c2,a,3", "c2,c,4"};
  // two different file orders, same timestamps
  const auto log1 = ingest(std::string("case_id,activity,timestamp\n") + rows[0] +
                           "\n" + rows[1] + "\n" + rows[2] + "\n" + rows[3] + "\n");
  const auto log2 = ingest(std::string("case_id,activity,timestamp\n") + rows[3] +
                           "\n" + rows[1] + "\n" + rows[0] + "\n" + rows[2] + "\n");
  CHECK(log1 == log2);
}

TEST_CASE("synth rejects an exhausted variant space") {
  SynthConfig config;
  config.cases = 10;
  config.variant_count = 2;
  config.alphabet = 1;
  config.min_length = 1;
  config.max_length = 1;  // only one possible variant
  CHECK_THROWS_AS(synth_log(config), InputError);
}
