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

#include "logveil/encoding.hpp"

#include <algorithm>
#include <cmath>

#include "logveil/error.hpp"

namespace logveil {

VariantVocabulary::VariantVocabulary(std::vector<TraceVariant> ordered)
    : variants_(std::move(ordered)) {
  for (std::size_t i = 0; i < variants_.size(); ++i) {
    if (!index_.emplace(variants_[i], i).second) {
      throw InputError("duplicate variant in vocabulary");
    }
  }
}

VariantVocabulary VariantVocabulary::from_log(const SimpleEventLog& log) {
  if (log.empty()) throw InputError("empty log");
  std::vector<std::pair<TraceVariant, std::int64_t>> entries(log.variants.begin(),
                                                             log.variants.end());
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<TraceVariant> ordered;
  ordered.reserve(entries.size());
  for (auto& e : entries) ordered.push_back(std::move(e.first));
  return VariantVocabulary(std::move(ordered));
}

const TraceVariant& VariantVocabulary::variant_at(std::size_t column) const {
  if (column >= variants_.size()) throw InputError("vocabulary column out of range");
  return variants_[column];
}

std::size_t VariantVocabulary::column_of(const TraceVariant& variant) const {
  auto it = index_.find(variant);
  if (it == index_.end()) throw InputError("variant not in vocabulary");
  return it->second;
}

bool VariantVocabulary::contains(const TraceVariant& variant) const {
  return index_.count(variant) != 0;
}

EncodedLog one_hot_encode(const SimpleEventLog& log) {
  EncodedLog encoded;
  encoded.vocab = VariantVocabulary::from_log(log);
  const std::size_t n = encoded.vocab.size();
  const std::int64_t m = log.total_cases();
  encoded.one_hot = Matrix(static_cast<std::size_t>(m), n);

  std::size_t row = 0;
  for (std::size_t col = 0; col < n; ++col) {
    const std::int64_t freq = log.variants.at(encoded.vocab.variant_at(col));
    for (std::int64_t k = 0; k < freq; ++k) {
      encoded.one_hot(row++, col) = 1.0;
    }
  }
  return encoded;
}

std::size_t decode_row_index(const double* row, std::size_t n) {
  if (n == 0) throw InputError("cannot decode a zero-width row");
  std::size_t best = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(row[j])) throw InputError("non-finite generator output");
    if (row[j] > row[best]) best = j;
  }
  return best;
}

const TraceVariant& decode_row(const std::vector<double>& row,
                               const VariantVocabulary& vocab) {
  if (row.size() != vocab.size()) {
    throw InputError("row length does not match vocabulary size");
  }
  return vocab.variant_at(decode_row_index(row.data(), row.size()));
}

SimpleEventLog one_hot_decode(const Matrix& rows, const VariantVocabulary& vocab) {
  SimpleEventLog log;
  if (rows.rows == 0) return log;
  if (rows.cols != vocab.size()) {
    throw InputError("row length does not match vocabulary size");
  }
  for (std::size_t i = 0; i < rows.rows; ++i) {
    log.add(vocab.variant_at(decode_row_index(rows.row(i), rows.cols)));
  }
  return log;
}

}  // namespace logveil
