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
#include <functional>
#include <span>
#include <vector>

#include "mdb/feature_matrix.hpp"
#include "mdb/kernels.hpp"
#include "mdb/model.hpp"

namespace mdb {

struct GbdtParams {
  int num_iterations = 200;
  double learning_rate = 0.05;
  int max_depth = 8;
  // L2 regularization on leaf weights.
  double lambda = 1.0;
  int max_bins = 256;
  // Iterations without validation improvement before stopping; <= 0 disables
  // stopping (the ensemble is still truncated at the best iteration).
  int early_stopping_patience = 20;
  int min_data_in_leaf = 20;
  double min_sum_hessian = 1e-3;
  double min_split_gain = 0.0;
  // Raw categorical splits: smoothing of the category ordering statistic,
  // extra L2 on the split gain, and the row count a category needs in a node
  // to join a left set.
  double cat_smooth = 10.0;
  double cat_l2 = 10.0;
  int min_data_per_group = 100;

  static GbdtParams from(const Hyperparams& hp);
  Hyperparams to_hyperparams() const;
};

// Per-sample logistic loss log(1 + e^m) - y m and its first two derivatives
// in the margin m.
double logistic_loss(double margin, std::uint8_t label);
kernels::GradPair logistic_grad_hess(double margin, std::uint8_t label);

// Training-fitted discretization. Numeric feature f maps x to the first bin b
// with x <= cuts[f][b]; raw categorical codes map to themselves, with the
// unseen code as the last bin.
class BinMapper {
 public:
  static BinMapper fit(const FeatureMatrix& x, int max_bins);

  kernels::BinnedMatrix transform(const FeatureMatrix& x) const;
  bool categorical(std::size_t f) const { return categorical_[f]; }
  const std::vector<double>& cuts(std::size_t f) const { return cuts_[f]; }
  std::size_t bins(std::size_t f) const;

 private:
  std::vector<bool> categorical_;
  std::vector<std::vector<double>> cuts_;
  std::vector<std::size_t> category_bins_;
};

// Tracks the best validation score; update returns true once `patience`
// iterations have passed without strict improvement.
class EarlyStopping {
 public:
  explicit EarlyStopping(int patience) : patience_(patience) {}
  bool update(std::size_t iteration, double value);
  std::size_t best_iteration() const { return best_iteration_; }
  double best_value() const { return best_value_; }

 private:
  int patience_;
  std::size_t best_iteration_ = 0;
  double best_value_ = 0.0;
  bool seen_ = false;
};

// Validation score after `iteration` trees from the current validation
// margins. The default is AUROC.
using ValidationMetric = std::function<double(std::size_t iteration, std::span<const double> margins,
                                              std::span<const std::uint8_t> labels)>;

// Grows one depth-wise tree on binned data with Newton leaf weights
// -G / (H + lambda). Returns a single-leaf tree when no split has positive
// gain.
Tree grow_boosted_tree(const kernels::BinnedMatrix& bins, const BinMapper& mapper,
                       std::span<const kernels::GradPair> gp, const GbdtParams& params);

FittedModel fit_gbdt(const FeatureMatrix& x, const FeatureMatrix& validation, const GbdtParams& params,
                     std::uint64_t seed = 0, const ValidationMetric& metric = {});

}  // namespace mdb
