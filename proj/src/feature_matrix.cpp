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

#include "mdb/feature_matrix.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "mdb/text.hpp"

namespace mdb {

namespace {
constexpr std::string_view kFormatTag = "#mdb-feature-matrix v1";
}

std::string_view feature_kind_name(FeatureKind k) {
  switch (k) {
    case FeatureKind::Numeric: return "Numeric";
    case FeatureKind::OneHot: return "OneHot";
    case FeatureKind::RawCategorical: return "RawCategorical";
    case FeatureKind::MissingFlag: return "MissingFlag";
  }
  return "?";
}

FeatureKind parse_feature_kind(std::string_view text) {
  for (const auto k : {FeatureKind::Numeric, FeatureKind::OneHot, FeatureKind::RawCategorical,
                       FeatureKind::MissingFlag}) {
    if (feature_kind_name(k) == text) return k;
  }
  throw ParseError("unknown feature kind '" + std::string(text) + "'");
}

std::size_t FeatureMatrix::positives() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), std::uint8_t{1}));
}

bool FeatureMatrix::has_raw_categoricals() const {
  return std::any_of(columns.begin(), columns.end(),
                     [](const FeatureColumn& c) { return c.kind == FeatureKind::RawCategorical; });
}

std::vector<std::string> FeatureMatrix::column_names() const {
  std::vector<std::string> out;
  out.reserve(columns.size());
  for (const auto& c : columns) out.push_back(c.name);
  return out;
}

std::vector<FeatureGroup> FeatureMatrix::groups() const {
  std::vector<FeatureGroup> out;
  std::map<std::string, std::size_t> index;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    const std::string& src = columns[j].source.empty() ? columns[j].name : columns[j].source;
    const auto [it, inserted] = index.emplace(src, out.size());
    if (inserted) out.push_back({src, {}});
    out[it->second].columns.push_back(j);
  }
  return out;
}

FeatureMatrix FeatureMatrix::select(std::span<const std::size_t> indices) const {
  FeatureMatrix out;
  out.columns = columns;
  const std::size_t p = cols();
  out.values.reserve(indices.size() * p);
  out.labels.reserve(indices.size());
  const bool with_keys = keys.size() == rows();
  for (const std::size_t i : indices) {
    const auto r = row(i);
    out.values.insert(out.values.end(), r.begin(), r.end());
    out.labels.push_back(labels[i]);
    if (with_keys) out.keys.push_back(keys[i]);
  }
  return out;
}

void write_feature_matrix(std::ostream& os, const FeatureMatrix& m, char d) {
  os << kFormatTag << '\n';
  os << "#rows" << d << m.rows() << '\n';
  for (const auto& c : m.columns) {
    os << "#column" << d << c.name << d << feature_kind_name(c.kind) << d << c.source << d;
    for (std::size_t k = 0; k < c.categories.size(); ++k) {
      if (k) os << ';';
      os << c.categories[k];
    }
    os << '\n';
  }
  os << "label";
  for (const auto& c : m.columns) os << d << c.name;
  os << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    os << int(m.labels[i]);
    for (const double v : m.row(i)) os << d << text::format_double(v);
    os << '\n';
  }
}

FeatureMatrix read_feature_matrix(std::istream& is, char d) {
  std::string line;
  if (!std::getline(is, line) || line != kFormatTag) {
    throw ParseError("feature matrix: missing format tag");
  }
  FeatureMatrix m;
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    if (line.empty() || line.front() != '#') break;
    const auto f = text::split(line, d);
    if (f[0] == "#rows" && f.size() == 2) {
      const auto n = text::parse_int(f[1]);
      if (!n || *n < 0) throw ParseError("feature matrix: bad row count");
      rows = static_cast<std::size_t>(*n);
    } else if (f[0] == "#column" && f.size() == 5) {
      FeatureColumn c{std::string(f[1]), parse_feature_kind(f[2]), std::string(f[3]), {}};
      if (!f[4].empty()) {
        for (const auto cat : text::split(f[4], ';')) c.categories.emplace_back(cat);
      }
      m.columns.push_back(std::move(c));
    } else {
      throw ParseError("feature matrix: bad metadata line '" + line + "'");
    }
  }
  // `line` now holds the header row.
  const auto header = text::split(line, d);
  if (header.size() != m.cols() + 1 || header[0] != "label") {
    throw ParseError("feature matrix: header does not match column metadata");
  }
  m.values.reserve(rows * m.cols());
  m.labels.reserve(rows);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = text::split(line, d);
    if (f.size() != m.cols() + 1) throw ParseError("feature matrix: ragged row");
    const auto y = text::parse_int(f[0]);
    if (!y || (*y != 0 && *y != 1)) throw ParseError("feature matrix: bad label");
    m.labels.push_back(static_cast<std::uint8_t>(*y));
    for (std::size_t j = 1; j < f.size(); ++j) {
      const auto v = text::parse_double(f[j]);
      if (!v) throw ParseError("feature matrix: bad value '" + std::string(f[j]) + "'");
      m.values.push_back(*v);
    }
  }
  if (m.rows() != rows) throw ParseError("feature matrix: row count mismatch");
  return m;
}

}  // namespace mdb
