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

#include "mdb/core.hpp"

#include <algorithm>
#include <cstdio>

namespace mdb {

Period::Period(int month, int year) : year_(year), month_(month) {
  if (month < 1 || month > 12) {
    throw PreconditionError("month out of range 1..12: " + std::to_string(month));
  }
  if (year < 1900 || year > 9999) {
    throw PreconditionError("year out of range 1900..9999: " + std::to_string(year));
  }
}

Period Period::from_ordinal(int ordinal) {
  if (ordinal < 0) {
    throw PreconditionError("period ordinal before 1900: " + std::to_string(ordinal));
  }
  return Period(ordinal % 12 + 1, 1900 + ordinal / 12);
}

Period parse_period(std::string_view text) {
  const auto quoted = [&] { return "'" + std::string(text) + "'"; };
  if (text.size() != 6) {
    throw ParseError("period must be 6 characters (MMYYYY), got " + quoted());
  }
  if (!std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw ParseError("period contains non-digit characters: " + quoted());
  }
  const auto digits = [&](std::size_t from, std::size_t count) {
    int v = 0;
    for (std::size_t i = from; i < from + count; ++i) v = v * 10 + (text[i] - '0');
    return v;
  };
  const int month = digits(0, 2);
  const int year = digits(2, 4);
  if (month < 1 || month > 12) {
    throw ParseError("period month out of range in " + quoted());
  }
  if (year < 1900) {
    throw ParseError("period year before 1900 in " + quoted());
  }
  return Period(month, year);
}

std::string format_period(Period p) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%02d%04d", p.month(), p.year());
  return buf;
}

Period add_months(Period p, int months) { return Period::from_ordinal(p.ordinal() + months); }

Label label_row(long long dlq_status) {
  if (dlq_status < 0) {
    throw PreconditionError("negative DLQ_STATUS: " + std::to_string(dlq_status));
  }
  return dlq_status == 0 ? Label::Negative : Label::Positive;
}

namespace {
std::optional<std::size_t> find_name(const std::vector<std::string>& names, std::string_view name) {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names.begin());
}
}  // namespace

std::optional<std::size_t> Dataset::numeric_index(std::string_view name) const {
  return find_name(numeric_names, name);
}

std::optional<std::size_t> Dataset::categorical_index(std::string_view name) const {
  return find_name(categorical_names, name);
}

}  // namespace mdb
