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
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mdb/core.hpp"
#include "mdb/schema.hpp"

namespace mdb {

enum class RejectReason { FieldCount, BadDate, OrderingViolation, BadLabel, DuplicateKey };

std::string_view reject_reason_name(RejectReason r);

struct Rejection {
  std::size_t line = 0;  // 1-based
  RejectReason reason = RejectReason::FieldCount;
  std::string detail;
};

struct RejectionReport {
  std::vector<Rejection> rejections;
  // Non-empty numeric cells that failed to parse; kept as missing.
  std::size_t unparsable_numeric_cells = 0;

  std::map<RejectReason, std::size_t> counts() const;
  std::size_t count(RejectReason r) const;
  bool empty() const { return rejections.empty(); }
  std::string to_text() const;
};

struct IngestResult {
  Dataset data;
  RejectionReport report;
};

// Reads header-less delimited rows laid out by `policy.layout`. Only kept
// feature columns are loaded. Missing mandatory columns in the layout throw;
// defective rows are rejected and counted. Empty cells are missing values.
IngestResult ingest(std::istream& in, const SchemaPolicy& policy, char delimiter = '|');
IngestResult ingest_file(const std::filesystem::path& path, const SchemaPolicy& policy,
                         char delimiter = '|');

}  // namespace mdb
