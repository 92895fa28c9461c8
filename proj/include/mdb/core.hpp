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

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mdb {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

// A calendar month. Ordering is (year, month) lexicographic.
class Period {
 public:
  constexpr Period() = default;
  // Throws PreconditionError when month is outside 1..12 or year outside
  // 1900..9999.
  Period(int month, int year);

  constexpr int month() const { return month_; }
  constexpr int year() const { return year_; }

  // Months since January 1900; convenient for dense indexing.
  constexpr int ordinal() const { return (year_ - 1900) * 12 + (month_ - 1); }
  static Period from_ordinal(int ordinal);

  friend constexpr auto operator<=>(const Period&, const Period&) = default;

 private:
  // Declaration order drives the defaulted comparison.
  int year_ = 1900;
  int month_ = 1;
};

// Parses the 6-character MMYYYY form.
Period parse_period(std::string_view text);
std::string format_period(Period p);

// Signed number of months from a to b.
constexpr int months_between(Period a, Period b) {
  return b.ordinal() - a.ordinal();
}

Period add_months(Period p, int months);

enum class Label : std::uint8_t { Negative = 0, Positive = 1 };

// Row-level rule: DLQ_STATUS 0 is current, anything above is a default.
Label label_row(long long dlq_status);

struct RowKey {
  std::string loan_id;
  Period orig_date;
  Period act_period;

  friend auto operator<=>(const RowKey&, const RowKey&) = default;
};

// One loan-month observation. Feature vectors are aligned with the owning
// Dataset's column name lists.
struct LoanRow {
  std::string loan_id;
  Period orig_date;
  Period act_period;
  int dlq_status = 0;
  std::vector<std::optional<double>> numeric;
  std::vector<std::optional<std::string>> categorical;

  RowKey key() const { return {loan_id, orig_date, act_period}; }
  Label label() const { return label_row(dlq_status); }
};

struct Dataset {
  std::vector<std::string> numeric_names;
  std::vector<std::string> categorical_names;
  std::vector<LoanRow> rows;

  // Same columns, no rows.
  Dataset empty_like() const { return {numeric_names, categorical_names, {}}; }

  std::optional<std::size_t> numeric_index(std::string_view name) const;
  std::optional<std::size_t> categorical_index(std::string_view name) const;
};

}  // namespace mdb
