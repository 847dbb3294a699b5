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

#ifndef LOGVEIL_ENCODING_HPP_
#define LOGVEIL_ENCODING_HPP_

#include <cstddef>
#include <map>
#include <vector>

#include "logveil/log.hpp"
#include "logveil/matrix.hpp"

namespace logveil {

// Bijection between trace variants and one-hot column indices. Columns are
// ordered by descending frequency, ties by lexicographic activity sequence,
// so the layout is stable across runs for the same input log.
class VariantVocabulary {
 public:
  VariantVocabulary() = default;
  // Takes an already-ordered column list (deserialization path).
  explicit VariantVocabulary(std::vector<TraceVariant> ordered);

  static VariantVocabulary from_log(const SimpleEventLog& log);

  std::size_t size() const { return variants_.size(); }
  const TraceVariant& variant_at(std::size_t column) const;
  std::size_t column_of(const TraceVariant& variant) const;
  bool contains(const TraceVariant& variant) const;
  const std::vector<TraceVariant>& variants() const { return variants_; }

  bool operator==(const VariantVocabulary& other) const {
    return variants_ == other.variants_;
  }

 private:
  std::vector<TraceVariant> variants_;
  std::map<TraceVariant, std::size_t> index_;
};

// Case-by-variant binary matrix plus the column map that reverses it.
struct EncodedLog {
  VariantVocabulary vocab;
  Matrix one_hot;  // total_cases x vocab.size(), one 1 per row
};

// Builds the m x n training matrix; column j sums to the frequency of the
// variant at column j. Throws on an empty log.
EncodedLog one_hot_encode(const SimpleEventLog& log);

// Argmax decode, ties to the lowest column index. Throws InputError on
// non-finite coordinates ("non-finite generator output").
std::size_t decode_row_index(const double* row, std::size_t n);
const TraceVariant& decode_row(const std::vector<double>& row,
                               const VariantVocabulary& vocab);

// Decodes every row; the result's support is always a subset of the
// vocabulary, so generated logs never contain unseen variants.
SimpleEventLog one_hot_decode(const Matrix& rows, const VariantVocabulary& vocab);

}  // namespace logveil

#endif  // LOGVEIL_ENCODING_HPP_
