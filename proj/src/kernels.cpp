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

#include "mdb/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace mdb::kernels {

double softplus(double m) { return std::max(m, 0.0) + std::log1p(std::exp(-std::abs(m))); }

double sigmoid(double m) {
  if (m >= 0) return 1.0 / (1.0 + std::exp(-m));
  const double e = std::exp(m);
  return e / (1.0 + e);
}

namespace {

inline std::uint8_t classify_one(int orig, int act, int c1, int c2) {
  if (act < orig) return kInvalidOrdering;
  if (act < c1) return 0;                              // both before c1
  if (orig >= c1 && act < c2) return 1;                // both in [c1, c2)
  if (orig >= c2) return 2;                            // both at or after c2
  return 3;
}

// Histogram of a single feature over `rows`, accumulated in row order.
inline void feature_histogram(const BinnedMatrix& bins, std::size_t f,
                              std::span<const std::uint32_t> rows, std::span<const GradPair> gp,
                              HistBin* hist) {
  const std::uint16_t* col = bins.codes.data() + f * bins.rows;
  for (const std::uint32_t r : rows) {
    HistBin& b = hist[col[r]];
    b.grad += gp[r].grad;
    b.hess += gp[r].hess;
    ++b.count;
  }
}

inline double row_loss_grad(const double* zi, std::size_t cols, std::uint8_t yi,
                            std::span<const double> w, double b, double* grad_w,
                            double& grad_b) {
  double m = b;
  for (std::size_t j = 0; j < cols; ++j) m += w[j] * zi[j];
  const double r = sigmoid(m) - static_cast<double>(yi);
  for (std::size_t j = 0; j < cols; ++j) grad_w[j] += r * zi[j];
  grad_b += r;
  return softplus(m) - static_cast<double>(yi) * m;
}

}  // namespace

namespace serial {

void build_histograms(const BinnedMatrix& bins, std::span<const std::uint32_t> rows,
                      std::span<const GradPair> gp, std::span<HistBin> out) {
  std::fill(out.begin(), out.end(), HistBin{});
  for (std::size_t f = 0; f < bins.features(); ++f) {
    feature_histogram(bins, f, rows, gp, out.data() + bins.offsets[f]);
  }
}

void ensemble_margin(std::span<const Tree> trees, double scale, std::span<const double> x,
                     std::size_t cols, std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto row = x.subspan(i * cols, cols);
    double s = 0.0;
    for (const Tree& t : trees) s += t.predict(row);
    out[i] += scale * s;
  }
}

LossAndInterceptGrad logistic_loss_grad(std::span<const double> z, std::size_t cols,
                                        std::span<const std::uint8_t> y,
                                        std::span<const double> w, double b,
                                        std::span<double> grad_w) {
  std::fill(grad_w.begin(), grad_w.end(), 0.0);
  LossAndInterceptGrad out;
  for (std::size_t i = 0; i < y.size(); ++i) {
    out.loss += row_loss_grad(z.data() + i * cols, cols, y[i], w, b, grad_w.data(),
                              out.grad_intercept);
  }
  return out;
}

void classify_ordinals(std::span<const int> orig, std::span<const int> act, int validation_start,
                       int test_start, std::span<std::uint8_t> out) {
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = classify_one(orig[i], act[i], validation_start, test_start);
  }
}

}  // namespace serial

namespace omp {

void build_histograms(const BinnedMatrix& bins, std::span<const std::uint32_t> rows,
                      std::span<const GradPair> gp, std::span<HistBin> out) {
  std::fill(out.begin(), out.end(), HistBin{});
  const auto nf = static_cast<std::ptrdiff_t>(bins.features());
  const bool big = rows.size() * bins.features() > 1u << 14;
#pragma omp parallel for schedule(dynamic, 1) if (big)
  for (std::ptrdiff_t f = 0; f < nf; ++f) {
    feature_histogram(bins, static_cast<std::size_t>(f), rows, gp,
                      out.data() + bins.offsets[static_cast<std::size_t>(f)]);
  }
}

void ensemble_margin(std::span<const Tree> trees, double scale, std::span<const double> x,
                     std::size_t cols, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static) if (n > 256)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto row = x.subspan(static_cast<std::size_t>(i) * cols, cols);
    double s = 0.0;
    for (const Tree& t : trees) s += t.predict(row);
    out[static_cast<std::size_t>(i)] += scale * s;
  }
}

LossAndInterceptGrad logistic_loss_grad(std::span<const double> z, std::size_t cols,
                                        std::span<const std::uint8_t> y,
                                        std::span<const double> w, double b,
                                        std::span<double> grad_w) {
  const std::size_t n = y.size();
  const std::size_t blocks = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<double> partial_grad(blocks * cols, 0.0);
  std::vector<double> partial_loss(blocks, 0.0);
  std::vector<double> partial_b(blocks, 0.0);
  const auto nb = static_cast<std::ptrdiff_t>(blocks);
#pragma omp parallel for schedule(static) if (blocks > 1)
  for (std::ptrdiff_t bi = 0; bi < nb; ++bi) {
    const auto k = static_cast<std::size_t>(bi);
    const std::size_t lo = k * kReductionBlock;
    const std::size_t hi = std::min(n, lo + kReductionBlock);
    double* g = partial_grad.data() + k * cols;
    double loss = 0.0, gb = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      loss += row_loss_grad(z.data() + i * cols, cols, y[i], w, b, g, gb);
    }
    partial_loss[k] = loss;
    partial_b[k] = gb;
  }
  std::fill(grad_w.begin(), grad_w.end(), 0.0);
  LossAndInterceptGrad out;
  for (std::size_t k = 0; k < blocks; ++k) {
    out.loss += partial_loss[k];
    out.grad_intercept += partial_b[k];
    const double* g = partial_grad.data() + k * cols;
    for (std::size_t j = 0; j < cols; ++j) grad_w[j] += g[j];
  }
  return out;
}

void classify_ordinals(std::span<const int> orig, std::span<const int> act, int validation_start,
                       int test_start, std::span<std::uint8_t> out) {
  const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static) if (n > 4096)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out[k] = classify_one(orig[k], act[k], validation_start, test_start);
  }
}

}  // namespace omp

}  // namespace mdb::kernels
