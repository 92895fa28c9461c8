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

#include "mdb/ingest.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "mdb/text.hpp"

namespace mdb {

std::string_view reject_reason_name(RejectReason r) {
  switch (r) {
    case RejectReason::FieldCount: return "FieldCount";
    case RejectReason::BadDate: return "BadDate";
    case RejectReason::OrderingViolation: return "OrderingViolation";
    case RejectReason::BadLabel: return "BadLabel";
    case RejectReason::DuplicateKey: return "DuplicateKey";
  }
  return "?";
}

std::map<RejectReason, std::size_t> RejectionReport::counts() const {
  std::map<RejectReason, std::size_t> out;
  for (const auto& r : rejections) ++out[r.reason];
  return out;
}

std::size_t RejectionReport::count(RejectReason r) const {
  const auto c = counts();
  const auto it = c.find(r);
  return it == c.end() ? 0 : it->second;
}

std::string RejectionReport::to_text() const {
  std::ostringstream os;
  os << "rejected " << rejections.size() << " rows\n";
  for (const auto& [reason, n] : counts()) os << "  " << reject_reason_name(reason) << ": " << n << '\n';
  if (unparsable_numeric_cells > 0) {
    os << "  unparsable numeric cells treated as missing: " << unparsable_numeric_cells << '\n';
  }
  return os.str();
}

IngestResult ingest(std::istream& in, const SchemaPolicy& policy, char delimiter) {
  const auto position_of = [&](std::string_view name) {
    const SourceColumn* c = policy.find(name);
    if (c == nullptr) {
      throw PreconditionError("mandatory column " + std::string(name) + " missing from schema layout");
    }
    return c->position;
  };
  const std::size_t pos_id = position_of(kLoanIdColumn);
  const std::size_t pos_orig = position_of(kOrigDateColumn);
  const std::size_t pos_act = position_of(kActPeriodColumn);
  const std::size_t pos_dlq = position_of(kDlqStatusColumn);

  std::size_t width = 0;
  for (const auto& c : policy.layout) width = std::max(width, c.position + 1);

  IngestResult result;
  Dataset& data = result.data;
  data.numeric_names = policy.keep_numeric;
  data.categorical_names = policy.keep_categorical;
  std::vector<std::size_t> numeric_pos, categorical_pos;
  for (const auto& n : data.numeric_names) {
    const SourceColumn* c = policy.find(n);
    if (c == nullptr) throw PreconditionError("kept column " + n + " missing from schema layout");
    numeric_pos.push_back(c->position);
  }
  for (const auto& n : data.categorical_names) {
    const SourceColumn* c = policy.find(n);
    if (c == nullptr) throw PreconditionError("kept column " + n + " missing from schema layout");
    categorical_pos.push_back(c->position);
  }

  std::set<RowKey> seen;
  std::string line;
  std::size_t line_no = 0;
  auto& report = result.report;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = text::split(line, delimiter);
    if (fields.size() < width) {
      report.rejections.push_back({line_no, RejectReason::FieldCount,
                                   "expected at least " + std::to_string(width) + " fields, got " +
                                       std::to_string(fields.size())});
      continue;
    }
    LoanRow row;
    row.loan_id = std::string(text::trim(fields[pos_id]));
    try {
      row.orig_date = parse_period(text::trim(fields[pos_orig]));
      row.act_period = parse_period(text::trim(fields[pos_act]));
    } catch (const ParseError& e) {
      report.rejections.push_back({line_no, RejectReason::BadDate, e.what()});
      continue;
    }
    if (row.act_period < row.orig_date) {
      report.rejections.push_back({line_no, RejectReason::OrderingViolation,
                                   "ACT_PERIOD " + format_period(row.act_period) +
                                       " precedes ORIG_DATE " + format_period(row.orig_date)});
      continue;
    }
    const auto dlq = text::parse_int(fields[pos_dlq]);
    if (!dlq || *dlq < 0 || *dlq > 999) {
      report.rejections.push_back(
          {line_no, RejectReason::BadLabel, "DLQ_STATUS '" + std::string(fields[pos_dlq]) + "'"});
      continue;
    }
    row.dlq_status = static_cast<int>(*dlq);
    if (!seen.insert(row.key()).second) {
      report.rejections.push_back({line_no, RejectReason::DuplicateKey, "duplicate key for " + row.loan_id});
      continue;
    }

    row.numeric.reserve(numeric_pos.size());
    for (const std::size_t p : numeric_pos) {
      const std::string_view cell = text::trim(fields[p]);
      auto v = text::parse_double(cell);
      if (!v && !cell.empty()) ++report.unparsable_numeric_cells;
      row.numeric.push_back(v);
    }
    row.categorical.reserve(categorical_pos.size());
    for (const std::size_t p : categorical_pos) {
      const std::string_view cell = text::trim(fields[p]);
      row.categorical.push_back(cell.empty() ? std::nullopt : std::optional<std::string>(cell));
    }
    data.rows.push_back(std::move(row));
  }
  return result;
}

IngestResult ingest_file(const std::filesystem::path& path, const SchemaPolicy& policy, char delimiter) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open data file " + path.string());
  return ingest(is, policy, delimiter);
}

}  // namespace mdb
