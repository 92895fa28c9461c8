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
#include <map>
#include <ostream>
#include <string>

#include "mdb/core.hpp"
#include "mdb/schema.hpp"

namespace mdb {

// Synthetic loan-performance data. Each loan originates uniformly within
// [start, end] and reports one row per month through `end`. DLQ_STATUS is
// drawn from a logistic model whose signal terms are:
//   LOAN_AGE     2 u e^(1 - u) - 1 with u = age / 3    (early-default hump)
//   CSCORE_B     0.3 clip(-(score - 745) / 45, -3, 3), plus 1.5 below 690
//   CURRENT_UPB  |log(balance / 300000)| / 0.45 - 0.8  (U-shaped)
//   ORIG_UPB     log(balance / 300000) / 0.45
// with the intercept solved so the mean default probability over all rows
// equals base_default_rate. All other columns are noise or leakage bait.
struct GenSpec {
  std::size_t n_loans = 11000;
  Period start{1, 2023};
  Period end{12, 2024};
  double base_default_rate = 0.01;
  std::map<std::string, double> signal{
      {"LOAN_AGE", 4.0}, {"CSCORE_B", 1.0}, {"CURRENT_UPB", 1.0}, {"ORIG_UPB", 0.8}};
  std::uint64_t seed = 7;

  // Throws PreconditionError on an empty span, zero loans, a rate outside
  // (0, 1), or a signal name without a defined term.
  void validate() const;
};

struct GenManifest {
  std::uint64_t seed = 0;
  std::size_t n_loans = 0;
  std::size_t n_rows = 0;
  std::size_t positives = 0;
  double intercept = 0.0;
  std::map<std::string, double> coefficients;
  double expected_positive_rate = 0.0;
  double empirical_positive_rate = 0.0;
  std::string dominant_feature;

  std::string to_text(const GenSpec& spec) const;
};

// The source layout and leakage policy of generated files: 26 numeric and 16
// categorical kept columns (ZIP geocoded), identifiers, dates and payment
// history dropped.
SchemaPolicy synthetic_schema();

// Writes header-less rows in synthetic_schema() layout to `out`.
GenManifest generate(const GenSpec& spec, std::ostream& out, char delimiter = '|');

struct GeneratedFiles {
  std::filesystem::path data;
  std::filesystem::path schema;
  std::filesystem::path manifest;
  std::filesystem::path zip3;
};

// Writes loans.dat, schema.txt, manifest.txt and zip3.tsv into `dir`.
GeneratedFiles generate_to_directory(const GenSpec& spec, const std::filesystem::path& dir,
                                     GenManifest* manifest = nullptr, char delimiter = '|');

}  // namespace mdb
