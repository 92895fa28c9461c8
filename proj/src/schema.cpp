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

#include "mdb/schema.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "mdb/text.hpp"

namespace mdb {

std::string_view drop_reason_name(DropReason r) {
  switch (r) {
    case DropReason::Identifier: return "Identifier";
    case DropReason::Date: return "Date";
    case DropReason::PaymentHistory: return "PaymentHistory";
    case DropReason::HighMissing: return "HighMissing";
    case DropReason::HighCardinality: return "HighCardinality";
  }
  return "?";
}

DropReason parse_drop_reason(std::string_view text) {
  for (const auto r : {DropReason::Identifier, DropReason::Date, DropReason::PaymentHistory,
                       DropReason::HighMissing, DropReason::HighCardinality}) {
    if (drop_reason_name(r) == text) return r;
  }
  throw ParseError("unknown drop reason '" + std::string(text) + "'");
}

const SourceColumn* SchemaPolicy::find(std::string_view name) const {
  const auto it = std::find_if(layout.begin(), layout.end(),
                               [&](const SourceColumn& c) { return c.name == name; });
  return it == layout.end() ? nullptr : &*it;
}

std::vector<std::string> SchemaPolicy::source_columns() const {
  std::vector<SourceColumn> sorted = layout;
  std::sort(sorted.begin(), sorted.end(),
            [](const SourceColumn& a, const SourceColumn& b) { return a.position < b.position; });
  std::vector<std::string> out;
  for (const auto& c : sorted) out.push_back(c.name);
  return out;
}

bool SchemaPolicy::is_kept(std::string_view name) const {
  const auto has = [&](const std::vector<std::string>& v) {
    return std::find(v.begin(), v.end(), name) != v.end();
  };
  return has(keep_numeric) || has(keep_categorical);
}

SchemaPolicy parse_schema_sidecar(std::string_view content, char delimiter) {
  SchemaPolicy policy;
  std::set<std::size_t> positions;
  std::size_t line_no = 0;
  std::istringstream is{std::string(content)};
  std::string raw;
  while (std::getline(is, raw)) {
    ++line_no;
    const std::string_view line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto fields = text::split(line, delimiter);
    const auto where = [&] { return "schema line " + std::to_string(line_no) + ": "; };
    if (fields.size() != 4) {
      throw ParseError(where() + "expected 4 fields (name, position, kind, action), got " +
                       std::to_string(fields.size()));
    }
    SourceColumn col;
    col.name = std::string(text::trim(fields[0]));
    const auto pos = text::parse_int(fields[1]);
    if (col.name.empty()) throw ParseError(where() + "empty column name");
    if (!pos || *pos < 0) throw ParseError(where() + "bad position '" + std::string(fields[1]) + "'");
    col.position = static_cast<std::size_t>(*pos);
    if (!positions.insert(col.position).second) {
      throw ParseError(where() + "duplicate position " + std::to_string(col.position));
    }
    if (policy.find(col.name) != nullptr) throw ParseError(where() + "duplicate column " + col.name);

    const std::string_view kind = text::trim(fields[2]);
    bool zip = false;
    if (kind == "numeric") {
      col.kind = SourceKind::Numeric;
    } else if (kind == "categorical") {
      col.kind = SourceKind::Categorical;
    } else if (kind == "zip3") {
      col.kind = SourceKind::Categorical;
      zip = true;
    } else {
      throw ParseError(where() + "unknown kind '" + std::string(kind) + "'");
    }

    const std::string_view action = text::trim(fields[3]);
    if (action == "keep") {
      (col.kind == SourceKind::Numeric ? policy.keep_numeric : policy.keep_categorical)
          .push_back(col.name);
      if (zip) {
        if (policy.zip_column) throw ParseError(where() + "more than one zip3 column");
        policy.zip_column = col.name;
      }
    } else {
      policy.drop_reasons[col.name] = parse_drop_reason(action);
    }
    policy.layout.push_back(std::move(col));
  }
  return policy;
}

SchemaPolicy load_schema_sidecar(const std::filesystem::path& path, char delimiter) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open schema file " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_schema_sidecar(ss.str(), delimiter);
}

std::string format_schema_sidecar(const SchemaPolicy& policy, char delimiter) {
  std::ostringstream os;
  os << "# name" << delimiter << "position" << delimiter << "kind" << delimiter << "action\n";
  std::vector<SourceColumn> sorted = policy.layout;
  std::sort(sorted.begin(), sorted.end(),
            [](const SourceColumn& a, const SourceColumn& b) { return a.position < b.position; });
  for (const auto& c : sorted) {
    std::string kind = c.kind == SourceKind::Numeric ? "numeric" : "categorical";
    if (policy.zip_column && *policy.zip_column == c.name) kind = "zip3";
    std::string action = "keep";
    if (const auto it = policy.drop_reasons.find(c.name); it != policy.drop_reasons.end()) {
      action = std::string(drop_reason_name(it->second));
    }
    os << c.name << delimiter << c.position << delimiter << kind << delimiter << action << '\n';
  }
  return os.str();
}

std::size_t AuditReport::kept_numeric() const {
  return static_cast<std::size_t>(
      std::count_if(kept.begin(), kept.end(), [](const AuditEntry& e) { return e.kind == "numeric"; }));
}

std::size_t AuditReport::kept_categorical() const { return kept.size() - kept_numeric(); }

std::string AuditReport::to_text() const {
  std::ostringstream os;
  os << "kept " << kept.size() << " (" << kept_numeric() << " numeric, " << kept_categorical()
     << " categorical)\n";
  for (const auto& e : kept) os << "  keep  " << e.name << "  " << e.kind << '\n';
  os << "dropped " << dropped.size() << '\n';
  for (const auto& e : dropped) os << "  drop  " << e.name << "  " << drop_reason_name(*e.reason) << '\n';
  return os.str();
}

AuditReport audit_schema(const std::vector<std::string>& columns, const SchemaPolicy& policy) {
  const std::unordered_set<std::string> present(columns.begin(), columns.end());
  const auto require_present = [&](const std::string& name) {
    if (!present.contains(name)) {
      throw PreconditionError("schema policy names column '" + name + "' absent from the source");
    }
  };
  for (const auto& n : policy.keep_numeric) require_present(n);
  for (const auto& n : policy.keep_categorical) require_present(n);
  for (const auto& [n, r] : policy.drop_reasons) require_present(n);

  AuditReport report;
  for (const auto& name : columns) {
    const bool numeric = std::find(policy.keep_numeric.begin(), policy.keep_numeric.end(), name) !=
                         policy.keep_numeric.end();
    const bool categorical =
        std::find(policy.keep_categorical.begin(), policy.keep_categorical.end(), name) !=
        policy.keep_categorical.end();
    const auto drop = policy.drop_reasons.find(name);
    const int classes = int(numeric) + int(categorical) + int(drop != policy.drop_reasons.end());
    if (classes == 0) {
      throw PreconditionError("column '" + name + "' is not classified by the schema policy");
    }
    if (classes > 1) {
      throw PreconditionError("column '" + name + "' is classified more than once");
    }
    if (drop != policy.drop_reasons.end()) {
      report.dropped.push_back({name, "", drop->second});
    } else if (numeric) {
      report.kept.push_back({name, "numeric", std::nullopt});
    } else {
      const bool zip = policy.zip_column && *policy.zip_column == name;
      report.kept.push_back({name, zip ? "zip3" : "categorical", std::nullopt});
    }
  }
  return report;
}

SchemaPolicy apply_cardinality_and_missing_filters(const Dataset& train, const SchemaPolicy& policy,
                                                   std::vector<ColumnProfile>* profiles) {
  SchemaPolicy out = policy;
  out.keep_numeric.clear();
  out.keep_categorical.clear();
  const std::size_t n = train.rows.size();

  for (const auto& name : policy.keep_numeric) {
    const auto idx = train.numeric_index(name);
    if (!idx) throw PreconditionError("numeric column '" + name + "' missing from dataset");
    ColumnProfile p{name, 0, n, 0};
    for (const auto& r : train.rows) p.missing += r.numeric[*idx].has_value() ? 0 : 1;
    if (p.missing_rate() > policy.missing_rate_limit) {
      out.drop_reasons[name] = DropReason::HighMissing;
    } else {
      out.keep_numeric.push_back(name);
    }
    if (profiles) profiles->push_back(p);
  }

  for (const auto& name : policy.keep_categorical) {
    const auto idx = train.categorical_index(name);
    if (!idx) throw PreconditionError("categorical column '" + name + "' missing from dataset");
    ColumnProfile p{name, 0, n, 0};
    std::unordered_set<std::string_view> distinct;
    for (const auto& r : train.rows) {
      const auto& v = r.categorical[*idx];
      if (v) {
        distinct.insert(*v);
      } else {
        ++p.missing;
      }
    }
    p.distinct = distinct.size();
    const bool zip = policy.zip_column && *policy.zip_column == name;
    if (p.missing_rate() > policy.missing_rate_limit) {
      out.drop_reasons[name] = DropReason::HighMissing;
      if (zip) out.zip_column.reset();
    } else if (!zip && p.distinct > policy.cardinality_limit) {
      out.drop_reasons[name] = DropReason::HighCardinality;
    } else {
      out.keep_categorical.push_back(name);
    }
    if (profiles) profiles->push_back(p);
  }
  return out;
}

}  // namespace mdb
