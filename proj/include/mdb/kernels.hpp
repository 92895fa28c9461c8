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

// Data-parallel inner loops. Every kernel has a plain serial reference in
// kernels::serial and an OpenMP version in kernels::omp with the same
// signature. The OpenMP versions produce results that do not depend on the
// number of threads: work is split along an axis whose per-item result is
// computed serially (features, rows, trees) or reduced over fixed-size
// blocks in block order.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mdb/tree.hpp"

namespace mdb::kernels {

struct GradPair {
  double grad = 0.0;
  double hess = 0.0;
};

struct HistBin {
  double grad = 0.0;
  double hess = 0.0;
  std::uint32_t count = 0;
};

// Column-major bin codes. Feature f owns histogram slots
// [offsets[f], offsets[f + 1]) and its code for row i is codes[f * rows + i].
struct BinnedMatrix {
  std::size_t rows = 0;
  std::vector<std::uint32_t> offsets{0};
  std::vector<std::uint16_t> codes;

  std::size_t features() const { return offsets.size() - 1; }
  std::size_t total_bins() const { return offsets.back(); }
  std::size_t bins(std::size_t f) const { return offsets[f + 1] - offsets[f]; }
  std::uint16_t code(std::size_t f, std::size_t row) const { return codes[f * rows + row]; }
};

// Row block used by the blocked reductions.
inline constexpr std::size_t kReductionBlock = 2048;

// Code written by classify_ordinals for act < orig.
inline constexpr std::uint8_t kInvalidOrdering = 0xFF;

namespace serial {

// Accumulates (grad, hess, count) of `rows` into `out` (size total_bins()),
// which is zeroed first.
void build_histograms(const BinnedMatrix& bins, std::span<const std::uint32_t> rows,
                      std::span<const GradPair> gp, std::span<HistBin> out);

// out[i] += scale * sum_t trees[t](row i). X is row-major with `cols` columns.
void ensemble_margin(std::span<const Tree> trees, double scale, std::span<const double> x,
                     std::size_t cols, std::span<double> out);

// Sum over rows of the logistic loss log(1 + e^m) - y m with m = b + w.z,
// writing the gradient w.r.t. w into grad_w and returning
// {loss, d loss / d b}.
struct LossAndInterceptGrad {
  double loss = 0.0;
  double grad_intercept = 0.0;
};
LossAndInterceptGrad logistic_loss_grad(std::span<const double> z, std::size_t cols,
                                        std::span<const std::uint8_t> y,
                                        std::span<const double> w, double b,
                                        std::span<double> grad_w);

// Split codes (see mdb::Split) from month ordinals; kInvalidOrdering when
// act < orig.
void classify_ordinals(std::span<const int> orig, std::span<const int> act, int validation_start,
                       int test_start, std::span<std::uint8_t> out);

}  // namespace serial

namespace omp {

void build_histograms(const BinnedMatrix& bins, std::span<const std::uint32_t> rows,
                      std::span<const GradPair> gp, std::span<HistBin> out);

void ensemble_margin(std::span<const Tree> trees, double scale, std::span<const double> x,
                     std::size_t cols, std::span<double> out);

using serial::LossAndInterceptGrad;
LossAndInterceptGrad logistic_loss_grad(std::span<const double> z, std::size_t cols,
                                        std::span<const std::uint8_t> y,
                                        std::span<const double> w, double b,
                                        std::span<double> grad_w);

void classify_ordinals(std::span<const int> orig, std::span<const int> act, int validation_start,
                       int test_start, std::span<std::uint8_t> out);

}  // namespace omp

// Numerically stable log(1 + e^m).
double softplus(double m);
double sigmoid(double m);

}  // namespace mdb::kernels
