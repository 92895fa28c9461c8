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

#include "mdb/partition.hpp"

#include <fstream>
#include <unordered_map>

#include "mdb/kernels.hpp"

namespace mdb {

Cutoffs Cutoffs::make(Period validation_start, Period test_start) {
  if (!(validation_start < test_start)) {
    throw PreconditionError("cutoffs must satisfy validation_start < test_start, got " +
                            format_period(validation_start) + " >= " + format_period(test_start));
  }
  return {validation_start, test_start};
}

std::string_view split_name(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Validation: return "validation";
    case Split::Test: return "test";
    case Split::Discard: return "discard";
  }
  return "?";
}

std::optional<Split> classify(Period orig, Period act, const Cutoffs& cutoffs) noexcept {
  if (act < orig) return std::nullopt;
  if (act < cutoffs.validation_start) return Split::Train;
  if (orig >= cutoffs.validation_start && act < cutoffs.test_start) return Split::Validation;
  if (orig >= cutoffs.test_start) return Split::Test;
  return Split::Discard;
}

Split assign(Period orig, Period act, const Cutoffs& cutoffs) {
  const auto s = classify(orig, act, cutoffs);
  if (!s) {
    throw PreconditionError("ACT_PERIOD " + format_period(act) + " precedes ORIG_DATE " +
                            format_period(orig));
  }
  return *s;
}

std::vector<Split> assign_all(const Dataset& data, const Cutoffs& cutoffs) {
  const std::size_t n = data.rows.size();
  std::vector<int> orig(n), act(n);
  for (std::size_t i = 0; i < n; ++i) {
    orig[i] = data.rows[i].orig_date.ordinal();
    act[i] = data.rows[i].act_period.ordinal();
  }
  std::vector<std::uint8_t> codes(n);
  kernels::omp::classify_ordinals(orig, act, cutoffs.validation_start.ordinal(),
                                  cutoffs.test_start.ordinal(), codes);
  std::vector<Split> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (codes[i] == kernels::kInvalidOrdering) {
      const LoanRow& r = data.rows[i];
      throw PreconditionError("row " + std::to_string(i) + " (LOAN_ID=" + r.loan_id +
                              ", ORIG_DATE=" + format_period(r.orig_date) + ", ACT_PERIOD=" +
                              format_period(r.act_period) + "): ACT_PERIOD precedes ORIG_DATE");
    }
    out[i] = static_cast<Split>(codes[i]);
  }
  return out;
}

Partition partition_dataset(const Dataset& data, const Cutoffs& cutoffs, PartitionMode mode) {
  std::vector<Split> tags = assign_all(data, cutoffs);

  Partition out{data.empty_like(), data.empty_like(), data.empty_like(), {}, 0};
  if (mode == PartitionMode::StrictLoan) {
    // Bitmask of kept regions per loan.
    std::unordered_map<std::string_view, unsigned> regions;
    for (std::size_t i = 0; i < tags.size(); ++i) {
      if (tags[i] != Split::Discard) {
        regions[data.rows[i].loan_id] |= 1u << static_cast<unsigned>(tags[i]);
      }
    }
    for (std::size_t i = 0; i < tags.size(); ++i) {
      if (tags[i] == Split::Discard) continue;
      const unsigned mask = regions[data.rows[i].loan_id];
      if ((mask & (mask - 1)) != 0) {
        tags[i] = Split::Discard;
        ++out.strict_discards;
      }
    }
  }

  for (std::size_t i = 0; i < tags.size(); ++i) {
    const LoanRow& r = data.rows[i];
    switch (tags[i]) {
      case Split::Train: out.train.rows.push_back(r); break;
      case Split::Validation: out.validation.rows.push_back(r); break;
      case Split::Test: out.test.rows.push_back(r); break;
      case Split::Discard: out.discarded.push_back(r.key()); break;
    }
  }
  return out;
}

void write_discard_audit(const std::filesystem::path& path, std::span<const RowKey> keys,
                         char delimiter) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open discard audit file " + path.string());
  os << "LOAN_ID" << delimiter << "ORIG_DATE" << delimiter << "ACT_PERIOD" << '\n';
  for (const RowKey& k : keys) {
    os << k.loan_id << delimiter << format_period(k.orig_date) << delimiter
       << format_period(k.act_period) << '\n';
  }
}

}  // namespace mdb
