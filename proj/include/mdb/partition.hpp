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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mdb/core.hpp"

namespace mdb {

// Start of the validation window and start of the test window.
struct Cutoffs {
  Period validation_start{11, 2023};
  Period test_start{6, 2024};

  // Throws PreconditionError unless validation_start < test_start.
  static Cutoffs make(Period validation_start, Period test_start);
};

enum class Split : std::uint8_t { Train = 0, Validation = 1, Test = 2, Discard = 3 };

std::string_view split_name(Split s);

// Triangular partition of the (orig, act) plane:
//   Train       orig <  c1  and act <  c1
//   Validation  c1 <= orig < c2  and c1 <= act < c2
//   Test        orig >= c2  and act >= c2
//   Discard     everything else (the two overlap rectangles)
// Returns nullopt when act < orig.
std::optional<Split> classify(Period orig, Period act, const Cutoffs& cutoffs) noexcept;

// As classify, but throws PreconditionError on act < orig.
Split assign(Period orig, Period act, const Cutoffs& cutoffs);

enum class PartitionMode {
  RowLevel,
  // Discards every row of a loan whose rows land in more than one kept region.
  StrictLoan,
};

struct Partition {
  Dataset train;
  Dataset validation;
  Dataset test;
  std::vector<RowKey> discarded;
  // Rows discarded only because of StrictLoan.
  std::size_t strict_discards = 0;
};

// Every input row lands in exactly one of the four outputs; input order is
// preserved within each output.
Partition partition_dataset(const Dataset& data, const Cutoffs& cutoffs,
                            PartitionMode mode = PartitionMode::RowLevel);

// Per-row split tags, same length as data.rows.
std::vector<Split> assign_all(const Dataset& data, const Cutoffs& cutoffs);

// Writes loan_id, ORIG_DATE, ACT_PERIOD of each discarded row, one per line.
void write_discard_audit(const std::filesystem::path& path, std::span<const RowKey> keys,
                         char delimiter = '|');

}  // namespace mdb
