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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mdb/core.hpp"
#include "mdb/feature_matrix.hpp"
#include "mdb/partition.hpp"
#include "mdb/schema.hpp"
#include "mdb/zip3.hpp"

namespace mdb {

// OneHot feeds linear and forest learners; RawCategorical keeps integer
// category codes for the boosted trees.
enum class Pathway { OneHot, RawCategorical };

std::string_view pathway_name(Pathway p);
Pathway parse_pathway(std::string_view text);

inline constexpr std::string_view kMissingCategory = "MISSING";

struct EncodeReport {
  std::size_t imputed_numeric = 0;
  std::size_t zip_lookup_misses = 0;
  std::size_t unseen_categories = 0;
};

// Encoding statistics fitted on the Training split and frozen. Numerics are
// median-imputed with a companion missing flag; the ZIP column becomes
// latitude, longitude and a missing flag; missing categoricals become the
// MISSING category; categories are fixed from Training.
class FittedEncoder {
 public:
  struct NumericStat {
    std::string name;
    double median = 0.0;
  };
  struct CategoricalStat {
    std::string name;
    std::vector<std::string> categories;  // sorted
  };
  struct ZipStat {
    std::string name;
    double latitude_median = 0.0;
    double longitude_median = 0.0;
  };

  // Applies the cardinality and missing filters to `policy` using `train`,
  // then fits medians and category dictionaries. `train` must be the
  // Training split only.
  static FittedEncoder fit(const Dataset& train, const SchemaPolicy& policy, Zip3Table zip3);

  FeatureMatrix encode(const Dataset& data, Pathway pathway, EncodeReport* report = nullptr) const;

  // Canonical JSON of every Train-derived decision and statistic.
  std::string serialize() const;

  const SchemaPolicy& policy() const { return policy_; }
  const std::vector<NumericStat>& numeric_stats() const { return numeric_; }
  const std::vector<CategoricalStat>& categorical_stats() const { return categorical_; }
  const std::optional<ZipStat>& zip_stat() const { return zip_; }

 private:
  SchemaPolicy policy_;
  std::vector<NumericStat> numeric_;
  std::vector<CategoricalStat> categorical_;
  std::optional<ZipStat> zip_;
  Zip3Table zip3_;
};

// Fits on the rows of `mixed` that fall in the Training region under
// `cutoffs`; rows of any other region never reach the fit.
FittedEncoder fit_encoder_on_train(const Dataset& mixed, const Cutoffs& cutoffs,
                                   const SchemaPolicy& policy, Zip3Table zip3);

// Median by sort-and-middle (mean of the two middle values for even sizes).
double median_of(std::vector<double> values);

}  // namespace mdb
