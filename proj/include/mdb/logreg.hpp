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
#include <vector>

#include "mdb/feature_matrix.hpp"
#include "mdb/model.hpp"

namespace mdb {

enum class Penalty { L1, L2 };

struct LogRegParams {
  // Objective: sum of per-row logistic loss + (1 / C) * penalty(w), with
  // L1 = sum |w| and L2 = 0.5 * sum w^2. The intercept is not penalized.
  double C = 1.0;
  int max_epochs = 1000;
  // Stop once the relative objective decrease falls below this.
  double tolerance = 1e-8;

  static LogRegParams from(const Hyperparams& hp);
  void validate() const;
};

// Per-column centering and scaling fitted on training rows. Constant columns
// get scale 1.
struct Standardizer {
  std::vector<double> center;
  std::vector<double> scale;

  static Standardizer fit(const FeatureMatrix& x);
  std::vector<double> apply(const FeatureMatrix& x) const;
};

// L2 uses gradient descent with Armijo backtracking; L1 uses proximal gradient
// with soft-thresholding and backtracking. Both are monotone in the objective.
FittedModel fit_logreg(const FeatureMatrix& x, Penalty penalty, const LogRegParams& params,
                       std::uint64_t seed = 0);

// Full objective over standardized row-major data `z`.
double logreg_objective(std::span<const double> z, std::size_t cols, std::span<const std::uint8_t> y,
                        std::span<const double> w, double b, Penalty penalty, double C);

// Gradient of the differentiable part: the summed loss plus, for L2, the
// penalty term. Returns d/db.
double logreg_smooth_gradient(std::span<const double> z, std::size_t cols,
                              std::span<const std::uint8_t> y, std::span<const double> w, double b,
                              Penalty penalty, double C, std::span<double> grad_w);

}  // namespace mdb
