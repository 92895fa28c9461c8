/*
 * Copyright 2026 The mdbench Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mdb/core.hpp"

namespace mdb {

enum class FeatureKind { Numeric, OneHot, RawCategorical, MissingFlag };

std::string_view feature_kind_name(FeatureKind k);
FeatureKind parse_feature_kind(std::string_view text);

struct FeatureColumn {
  std::string name;
  FeatureKind kind = FeatureKind::Numeric;
  // Source column this was derived from; columns sharing a source form one
  // group for permutation importance.
  std::string source;
  // RawCategorical: code i means categories[i]; code categories.size() is the
  // reserved unseen code.
  std::vector<std::string> categories;

  friend bool operator==(const FeatureColumn&, const FeatureColumn&) = default;
};

struct FeatureGroup {
  std::string name;
  std::vector<std::size_t> columns;
};

// Dense row-major design matrix with binary labels.
struct FeatureMatrix {
  std::vector<FeatureColumn> columns;
  std::vector<double> values;
  std::vector<std::uint8_t> labels;
  std::vector<RowKey> keys;

  std::size_t rows() const { return labels.size(); }
  std::size_t cols() const { return columns.size(); }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(values).subspan(i * cols(), cols());
  }
  double at(std::size_t i, std::size_t j) const { return values[i * cols() + j]; }
  double& at(std::size_t i, std::size_t j) { return values[i * cols() + j]; }

  std::size_t positives() const;
  std::size_t negatives() const { return rows() - positives(); }
  bool has_raw_categoricals() const;
  std::vector<std::string> column_names() const;

  // Columns grouped by source, in first-appearance order.
  std::vector<FeatureGroup> groups() const;

  // Rows in the given order (indices may repeat).
  FeatureMatrix select(std::span<const std::size_t> indices) const;
};

// Columnar delimited text: a '#'-prefixed metadata block (format tag, row
// count, one line per column with name, kind, source and categories), a
// header line, then one line per row with the label followed by the values.
void write_feature_matrix(std::ostream& os, const FeatureMatrix& m, char delimiter = '|');
FeatureMatrix read_feature_matrix(std::istream& is, char delimiter = '|');

}  // namespace mdb
