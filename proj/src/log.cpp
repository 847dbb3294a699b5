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

#include "logveil/log.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "logveil/error.hpp"

namespace logveil {
namespace {

// Days between 1970-01-01 and y-m-d in the proleptic Gregorian calendar.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yr = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y = yr + (m <= 2);
}

bool is_leap(std::int64_t y) {
  return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

unsigned days_in_month(std::int64_t y, unsigned m) {
  static const unsigned kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap(y)) return 29;
  return kDays[m - 1];
}

struct TimestampParser {
  const std::string& text;
  std::size_t pos = 0;

  bool done() const { return pos >= text.size(); }
  char peek() const { return done() ? '\0' : text[pos]; }

  [[noreturn]] void fail() const {
    throw InputError("unparsable timestamp '" + text + "'");
  }

  int digits(int count) {
    int value = 0;
    for (int i = 0; i < count; ++i) {
      if (done() || !std::isdigit(static_cast<unsigned char>(text[pos]))) fail();
      value = value * 10 + (text[pos++] - '0');
    }
    return value;
  }

  void expect(char c) {
    if (done() || text[pos] != c) fail();
    ++pos;
  }
};

bool looks_numeric(const std::string& s) {
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
  bool any_digit = false;
  bool dot = false;
  for (; i < s.size(); ++i) {
    if (std::isdigit(static_cast<unsigned char>(s[i]))) {
      any_digit = true;
    } else if (s[i] == '.' && !dot) {
      dot = true;
    } else {
      return false;
    }
  }
  return any_digit;
}

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

// RFC-4180 style reader: quoted fields, doubled quotes as escapes, commas
// and newlines allowed inside quotes. Tracks the line a record starts on.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  // Returns false at end of input. Blank lines are skipped.
  bool read_record(std::vector<std::string>& fields, std::size_t& record_line) {
    fields.clear();
    int c = in_.get();
    while (c == '\n' || c == '\r') {
      if (c == '\n') ++line_;
      c = in_.get();
    }
    if (c == std::istream::traits_type::eof()) return false;
    record_line = line_;

    std::string field;
    bool in_quotes = false;
    while (true) {
      if (c == std::istream::traits_type::eof()) {
        if (in_quotes) {
          throw InputError("line " + std::to_string(record_line) +
                           ": unterminated quoted field");
        }
        fields.push_back(std::move(field));
        return true;
      }
      const char ch = static_cast<char>(c);
      if (in_quotes) {
        if (ch == '"') {
          if (in_.peek() == '"') {
            field.push_back('"');
            in_.get();
          } else {
            in_quotes = false;
          }
        } else {
          if (ch == '\n') ++line_;
          field.push_back(ch);
        }
      } else if (ch == '"' && field.empty()) {
        in_quotes = true;
      } else if (ch == ',') {
        fields.push_back(std::move(field));
        field.clear();
      } else if (ch == '\r') {
        // swallow; record ends at the following '\n'
      } else if (ch == '\n') {
        ++line_;
        fields.push_back(std::move(field));
        return true;
      } else {
        field.push_back(ch);
      }
      c = in_.get();
    }
  }

 private:
  std::istream& in_;
  std::size_t line_ = 1;
};

void write_csv_field(std::ostream& out, const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) {
    out << field;
    return;
  }
  out << '"';
  for (char c : field) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

std::string format_timestamp(std::int64_t seconds) {
  std::int64_t days = seconds / 86400;
  std::int64_t rem = seconds % 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  std::int64_t y;
  unsigned m, d;
  civil_from_days(days, y, m, d);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02lld:%02lld:%02lld",
                static_cast<long long>(y), m, d,
                static_cast<long long>(rem / 3600),
                static_cast<long long>((rem / 60) % 60),
                static_cast<long long>(rem % 60));
  return buf;
}

}  // namespace

void SimpleEventLog::add(TraceVariant variant, std::int64_t count) {
  if (count <= 0) throw InputError("variant frequency must be positive");
  variants[std::move(variant)] += count;
}

std::int64_t SimpleEventLog::total_cases() const {
  std::int64_t total = 0;
  for (const auto& [variant, freq] : variants) total += freq;
  return total;
}

double parse_timestamp(const std::string& text) {
  const std::string s = trim(text);
  if (s.empty()) throw InputError("unparsable timestamp ''");
  if (looks_numeric(s)) return std::stod(s);

  TimestampParser p{s};
  const int year = p.digits(4);
  p.expect('-');
  const int month = p.digits(2);
  p.expect('-');
  const int day = p.digits(2);
  if (month < 1 || month > 12 || day < 1 ||
      day > static_cast<int>(days_in_month(year, month))) {
    p.fail();
  }

  double seconds = static_cast<double>(days_from_civil(year, month, day)) * 86400.0;
  if (p.done()) return seconds;

  if (p.peek() == 'T' || p.peek() == ' ') {
    ++p.pos;
  } else {
    p.fail();
  }
  const int hour = p.digits(2);
  p.expect(':');
  const int minute = p.digits(2);
  int sec = 0;
  double frac = 0.0;
  if (!p.done() && p.peek() == ':') {
    ++p.pos;
    sec = p.digits(2);
    if (!p.done() && p.peek() == '.') {
      ++p.pos;
      double scale = 0.1;
      if (p.done() || !std::isdigit(static_cast<unsigned char>(p.peek()))) p.fail();
      while (!p.done() && std::isdigit(static_cast<unsigned char>(p.peek()))) {
        frac += (p.text[p.pos++] - '0') * scale;
        scale *= 0.1;
      }
    }
  }
  if (hour > 23 || minute > 59 || sec > 60) p.fail();
  seconds += hour * 3600.0 + minute * 60.0 + sec + frac;

  if (!p.done()) {
    const char z = p.peek();
    if (z == 'Z') {
      ++p.pos;
    } else if (z == '+' || z == '-') {
      ++p.pos;
      const int off_h = p.digits(2);
      int off_m = 0;
      if (!p.done() && p.peek() == ':') {
        ++p.pos;
        off_m = p.digits(2);
      } else if (!p.done()) {
        off_m = p.digits(2);
      }
      const double offset = off_h * 3600.0 + off_m * 60.0;
      seconds += (z == '+') ? -offset : offset;
    } else {
      p.fail();
    }
  }
  if (!p.done()) p.fail();
  return seconds;
}

SimpleEventLog ingest_csv(std::istream& source, const CsvSchema& schema) {
  CsvReader reader(source);
  std::vector<std::string> fields;
  std::size_t line = 0;

  if (!reader.read_record(fields, line)) {
    throw InputError("empty input: missing CSV header");
  }
  auto column_of = [&](const std::string& name) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (fields[i] == name) return i;
    }
    throw InputError("missing column '" + name + "' in CSV header");
  };
  const std::size_t case_col = column_of(schema.case_column);
  const std::size_t act_col = column_of(schema.activity_column);
  const std::size_t ts_col = column_of(schema.timestamp_column);
  const std::size_t width = fields.size();

  struct OrderedEvent {
    double key;
    std::string activity;
  };
  // map keeps case grouping deterministic; order within a case is by
  // timestamp with ties broken by file position (stable sort below).
  std::map<std::string, std::vector<OrderedEvent>> cases;

  while (reader.read_record(fields, line)) {
    if (fields.size() != width) {
      throw InputError("line " + std::to_string(line) + ": expected " +
                       std::to_string(width) + " fields, got " +
                       std::to_string(fields.size()));
    }
    const std::string& case_id = fields[case_col];
    const std::string& activity = fields[act_col];
    if (case_id.empty()) {
      throw InputError("line " + std::to_string(line) + ": empty case id");
    }
    if (activity.empty()) {
      throw InputError("line " + std::to_string(line) + ": empty activity");
    }
    double key;
    try {
      key = parse_timestamp(fields[ts_col]);
    } catch (const InputError& e) {
      throw InputError("line " + std::to_string(line) + ": " + e.what());
    }
    cases[case_id].push_back({key, activity});
  }

  SimpleEventLog log;
  for (auto& [case_id, events] : cases) {
    std::stable_sort(events.begin(), events.end(),
                     [](const OrderedEvent& a, const OrderedEvent& b) {
                       return a.key < b.key;
                     });
    TraceVariant variant;
    variant.activities.reserve(events.size());
    for (auto& e : events) variant.activities.push_back(std::move(e.activity));
    log.add(std::move(variant));
  }
  return log;
}

void write_csv(const SimpleEventLog& log, std::ostream& sink) {
  sink << "case_id,activity,timestamp\n";
  const std::int64_t total = log.total_cases();
  std::size_t width = std::to_string(total).size();

  std::int64_t case_index = 0;
  for (const auto& [variant, freq] : log.variants) {
    for (std::int64_t k = 0; k < freq; ++k) {
      ++case_index;
      std::string digits = std::to_string(case_index);
      const std::string id =
          "case_" + std::string(width - digits.size(), '0') + digits;
      std::int64_t tick = 0;
      for (const auto& activity : variant.activities) {
        sink << id << ',';
        write_csv_field(sink, activity);
        sink << ',' << format_timestamp(tick++) << '\n';
      }
    }
  }
  if (!sink) throw Error("failed to write CSV output");
}

LogStats log_stats(const SimpleEventLog& log) {
  if (log.empty()) throw InputError("empty log");
  LogStats stats;
  std::set<std::string> activities;
  for (const auto& [variant, freq] : log.variants) {
    stats.n_cases += freq;
    stats.n_events += freq * static_cast<std::int64_t>(variant.length());
    for (const auto& a : variant.activities) activities.insert(a);
  }
  stats.n_variants = static_cast<std::int64_t>(log.variants.size());
  stats.n_activities = static_cast<std::int64_t>(activities.size());
  stats.trace_uniqueness =
      static_cast<double>(stats.n_variants) / static_cast<double>(stats.n_cases);
  return stats;
}

SimpleEventLog read_log_file(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  return ingest_csv(in, schema);
}

void write_log_file(const SimpleEventLog& log, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  write_csv(log, out);
}

}  // namespace logveil
