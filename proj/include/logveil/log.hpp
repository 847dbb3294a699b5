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

#ifndef LOGVEIL_LOG_HPP_
#define LOGVEIL_LOG_HPP_

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace logveil {

// One ordered activity sequence; the control-flow footprint a case leaves in
// an event log. Empty sequences are reserved for the metrics module's dummy
// node and never come out of ingestion.
struct TraceVariant {
  std::vector<std::string> activities;

  std::size_t length() const { return activities.size(); }
  auto operator<=>(const TraceVariant&) const = default;
};

// Multiset of trace variants: variant -> number of cases tracing it.
// Each case contributes to exactly one variant.
struct SimpleEventLog {
  std::map<TraceVariant, std::int64_t> variants;

  void add(TraceVariant variant, std::int64_t count = 1);
  std::int64_t total_cases() const;
  bool empty() const { return variants.empty(); }
  bool operator==(const SimpleEventLog&) const = default;
};

struct EventRecord {
  std::string case_id;
  std::string activity;
  std::string timestamp;   // source text
  double order_key = 0.0;  // parsed timestamp, seconds
};

struct LogStats {
  std::int64_t n_events = 0;
  std::int64_t n_cases = 0;
  std::int64_t n_activities = 0;
  std::int64_t n_variants = 0;
  double trace_uniqueness = 0.0;  // n_variants / n_cases, exact
};

// Column names of the input CSV; all three must appear in the header.
struct CsvSchema {
  std::string case_column = "case_id";
  std::string activity_column = "activity";
  std::string timestamp_column = "timestamp";
};

// Parses an ISO-8601 timestamp ("2020-05-17", "2020-05-17T08:30:00.25Z",
// "2020-05-17 08:30:00+02:00") or a plain numeric value into a totally
// ordered key in seconds. Throws InputError when the text does not parse.
double parse_timestamp(const std::string& text);

// Reads a headered CSV, groups events by case, orders them by timestamp
// (ties keep file order) and returns the variant multiset.
SimpleEventLog ingest_csv(std::istream& source, const CsvSchema& schema = {});

// Emits one row per event with synthetic case ids and strictly increasing
// per-case timestamps. ingest_csv(write_csv(log)) == log.
void write_csv(const SimpleEventLog& log, std::ostream& sink);

LogStats log_stats(const SimpleEventLog& log);

SimpleEventLog read_log_file(const std::string& path, const CsvSchema& schema = {});
void write_log_file(const SimpleEventLog& log, const std::string& path);

}  // namespace logveil

#endif  // LOGVEIL_LOG_HPP_
