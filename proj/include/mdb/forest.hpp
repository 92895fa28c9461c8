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
#include <span>

#include "mdb/feature_matrix.hpp"
#include "mdb/model.hpp"
#include "mdb/random.hpp"
#include "mdb/tree.hpp"

namespace mdb {

struct ForestParams {
  int n_trees = 150;
  int min_samples_split = 8;
  int max_depth = 15;
  // Features examined per node; 0 means ceil(sqrt(p)).
  int max_features = 0;

  static ForestParams from(const Hyperparams& hp);
  int features_per_node(std::size_t p) const;
};

// Grows one Gini tree on the rows listed in `sample` (duplicates allowed, as
// produced by a bootstrap). Leaves hold the positive fraction of their rows.
// At each node features are visited in a random order until
// features_per_node non-constant features have been scored.
Tree fit_gini_tree(const FeatureMatrix& x, std::span<const std::size_t> sample,
                   const ForestParams& params, Rng& rng);

// Weighted Gini impurity n_left * gini(left) + n_right * gini(right), divided
// by the total count.
double weighted_gini(double n_left, double pos_left, double n_right, double pos_right);

// Trees are fitted in parallel, each on its own bootstrap resample of size n
// with a seed derived from (seed, tree index).
FittedModel fit_random_forest(const FeatureMatrix& x, const ForestParams& params, std::uint64_t seed);

}  // namespace mdb
