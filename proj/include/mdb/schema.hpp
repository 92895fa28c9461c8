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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mdb/core.hpp"

namespace mdb {

enum class DropReason { Identifier, Date, PaymentHistory, HighMissing, HighCardinality };

std::string_view drop_reason_name(DropReason r);
DropReason parse_drop_reason(std::string_view text);

enum class SourceKind { Numeric, Categorical };

// Position of one column in the header-less source file.
struct SourceColumn {
  std::string name;
  std::size_t position = 0;
  SourceKind kind = SourceKind::Numeric;
};

// Mandatory source columns; ingest reads them regardless of keep/drop.
inline constexpr std::string_view kLoanIdColumn = "LOAN_ID";
inline constexpr std::string_view kOrigDateColumn = "ORIG_DATE";
inline constexpr std::string_view kActPeriodColumn = "ACT_PERIOD";
inline constexpr std::string_view kDlqStatusColumn = "DLQ_STATUS";

// Leakage policy over the source columns. Every source column must be kept
// (as numeric or categorical) or dropped with a reason, never both.
struct SchemaPolicy {
  std::vector<SourceColumn> layout;
  std::vector<std::string> keep_numeric;
  std::vector<std::string> keep_categorical;
  std::map<std::string, DropReason> drop_reasons;
  // Kept categorical holding a ZIP code, geocoded by its 3-digit prefix.
  std::optional<std::string> zip_column;
  std::size_t cardinality_limit = 500;
  double missing_rate_limit = 0.5;

  const SourceColumn* find(std::string_view name) const;
  std::vector<std::string> source_columns() const;
  bool is_kept(std::string_view name) const;
};

// Sidecar format, one column per line, '#' starts a comment:
//   name|position|kind|action
// kind is numeric, categorical, or zip3 (a categorical ZIP column); action is
// `keep` or one of the drop reasons (Identifier, Date, PaymentHistory,
// HighMissing, HighCardinality).
SchemaPolicy parse_schema_sidecar(std::string_view text, char delimiter = '|');
SchemaPolicy load_schema_sidecar(const std::filesystem::path& path, char delimiter = '|');
std::string format_schema_sidecar(const SchemaPolicy& policy, char delimiter = '|');

struct AuditEntry {
  std::string name;
  std::string kind;  // numeric / categorical / zip3 for kept columns
  std::optional<DropReason> reason;
};

struct AuditReport {
  std::vector<AuditEntry> kept;
  std::vector<AuditEntry> dropped;

  std::size_t kept_numeric() const;
  std::size_t kept_categorical() const;
  std::string to_text() const;
};

// Classifies every source column. Throws PreconditionError naming any column
// that is unclassified, classified twice, or named by the policy but absent
// from `columns`.
AuditReport audit_schema(const std::vector<std::string>& columns, const SchemaPolicy& policy);

struct ColumnProfile {
  std::string name;
  std::size_t missing = 0;
  std::size_t total = 0;
  std::size_t distinct = 0;  // categoricals only
  double missing_rate() const { return total == 0 ? 0.0 : static_cast<double>(missing) / total; }
};

// Moves kept columns whose Training-split missing rate exceeds
// missing_rate_limit to HighMissing, and categoricals whose distinct
// non-missing count exceeds cardinality_limit to HighCardinality. The ZIP
// column is exempt from the cardinality rule since it is geocoded. `train`
// must be the Training split only.
SchemaPolicy apply_cardinality_and_missing_filters(const Dataset& train, const SchemaPolicy& policy,
                                                   std::vector<ColumnProfile>* profiles = nullptr);

}  // namespace mdb
