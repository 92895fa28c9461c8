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
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mdb/feature_matrix.hpp"

namespace mdb {

// Negatives retained per positive, e.g. 2 means 1:2.
struct RatioConfig {
  std::vector<int> ratios{1, 2, 5, 10};
  std::uint64_t seed = 0;

  // Throws PreconditionError when ratios is empty or any ratio < 1.
  void validate() const;
};

struct SampleResult {
  // Selected row indices in a deterministic shuffled order.
  std::vector<std::size_t> indices;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  // Set when the negative pool was smaller than ratio * positives.
  bool pool_exhausted = false;
  // Achieved negatives per positive.
  double achieved_ratio = 0.0;
  std::string warning;
};

// Keeps every positive and min(ratio * #pos, #neg) negatives drawn uniformly
// without replacement, then shuffles the result. Throws PreconditionError when
// there are no positives or ratio < 1.
SampleResult downsample(std::span<const std::uint8_t> labels, int ratio, std::uint64_t seed);

struct RatioDraw {
  SampleResult train;
  SampleResult validation;
};

// Train and Validation are downsampled per ratio with seeds derived from
// (seed, ratio, split); the Test split is never sampled and is addressed by
// test_rows alone.
struct RatioGrid {
  std::map<int, RatioDraw> draws;
  std::size_t test_rows = 0;
};

RatioGrid build_ratio_grid(std::span<const std::uint8_t> train_labels,
                           std::span<const std::uint8_t> validation_labels,
                           std::span<const std::uint8_t> test_labels, const RatioConfig& config);

// Row keys of a sample, one per line: LOAN_ID|ORIG_DATE|ACT_PERIOD|label.
void write_sample_manifest(const std::filesystem::path& path, const FeatureMatrix& source,
                           const SampleResult& sample, char delimiter = '|');

}  // namespace mdb
