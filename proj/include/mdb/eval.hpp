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
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mdb/feature_matrix.hpp"
#include "mdb/model.hpp"

namespace mdb {

// Probability that a random positive outscores a random negative, ties
// counting one half, via average ranks (Mann-Whitney U). Throws
// PreconditionError on length mismatch, a single class, or a non-finite score.
double auroc(std::span<const double> scores, std::span<const std::uint8_t> labels);

struct RocPoint {
  double threshold;  // +inf for the initial (0, 0) point
  double fpr;
  double tpr;
};

// One point per distinct score (descending), preceded by (0, 0). Rows with
// score >= threshold are predicted positive.
using RocCurve = std::vector<RocPoint>;

RocCurve roc_curve(std::span<const double> scores, std::span<const std::uint8_t> labels);
double trapezoid_area(const RocCurve& curve);

// threshold, fpr, tpr per line with a header.
void write_roc_curve(const std::filesystem::path& path, const RocCurve& curve, char delimiter = '\t');

struct ImportanceEntry {
  std::string feature;
  double mean_drop = 0.0;
  double sd = 0.0;
  std::size_t rank = 0;
  // AUROC drop of each repeat, in repeat order.
  std::vector<double> drops;
};

struct ImportanceReport {
  double baseline_auroc = 0.0;
  std::size_t repeats = 0;
  // One entry per feature group, in column-group order.
  std::vector<ImportanceEntry> entries;

  // Entries sorted by rank.
  std::vector<ImportanceEntry> ranked() const;
  const ImportanceEntry* find(std::string_view feature) const;
};

// For each feature group (columns sharing a source), the drop in AUROC when
// the group's columns are shuffled together across rows, averaged over
// `repeats` shuffles. Repeat r of group g uses a seed derived from
// (seed, g, r). Ranks order groups by mean drop, descending; ties keep group
// order.
ImportanceReport permutation_importance(const FittedModel& model, const FeatureMatrix& x,
                                        std::size_t repeats, std::uint64_t seed);

// feature, mean_drop, sd, rank in rank order.
void write_importance(const std::filesystem::path& path, const ImportanceReport& report,
                      char delimiter = '\t');

}  // namespace mdb
