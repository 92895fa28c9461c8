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

#include <gtest/gtest.h>
#include <omp.h>

#include <cmath>

#include "mdb/kernels.hpp"
#include "mdb/partition.hpp"
#include "mdb/random.hpp"

using namespace mdb;
using namespace mdb::kernels;

namespace {

BinnedMatrix random_bins(std::size_t rows, std::size_t features, Rng& rng) {
  BinnedMatrix b;
  b.rows = rows;
  for (std::size_t f = 0; f < features; ++f) b.offsets.push_back(b.offsets.back() + 2 + uniform_index(rng, 60));
  b.codes.resize(rows * features);
  for (std::size_t f = 0; f < features; ++f) {
    for (std::size_t i = 0; i < rows; ++i) b.codes[f * rows + i] = static_cast<std::uint16_t>(uniform_index(rng, b.bins(f)));
  }
  return b;
}

Tree random_tree(std::size_t cols, int depth, Rng& rng) {
  Tree t;
  std::vector<std::pair<std::size_t, int>> stack{{0, 0}};
  t.nodes.emplace_back();
  while (!stack.empty()) {
    const auto [i, d] = stack.back();
    stack.pop_back();
    if (d == depth) {
      t.nodes[i].value = uniform_unit(rng) - 0.5;
      continue;
    }
    TreeNode n;
    n.feature = static_cast<std::int32_t>(uniform_index(rng, cols));
    n.threshold = uniform_unit(rng);
    n.left = static_cast<std::int32_t>(t.nodes.size());
    n.right = n.left + 1;
    t.nodes[i] = n;
    t.nodes.emplace_back();
    t.nodes.emplace_back();
    stack.push_back({static_cast<std::size_t>(n.left), d + 1});
    stack.push_back({static_cast<std::size_t>(n.right), d + 1});
  }
  return t;
}

template <class F>
void with_threads(int n, F f) {
  const int old = omp_get_max_threads();
  omp_set_num_threads(n);
  f();
  omp_set_num_threads(old);
}

}  // namespace

TEST(Kernels, HistogramsMatchSerialExactly) {
  Rng rng(1);
  const BinnedMatrix b = random_bins(5000, 9, rng);
  std::vector<GradPair> gp(b.rows);
  for (auto& g : gp) g = {uniform_unit(rng) - 0.5, uniform_unit(rng) * 0.25};
  std::vector<std::uint32_t> rows;
  for (std::uint32_t i = 0; i < b.rows; ++i) {
    if (uniform_index(rng, 3)) rows.push_back(i);
  }
  std::vector<HistBin> a(b.total_bins()), c(b.total_bins(), HistBin{7, 7, 7});
  serial::build_histograms(b, rows, gp, a);
  with_threads(3, [&] { omp::build_histograms(b, rows, gp, c); });
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].grad, c[k].grad);
    EXPECT_EQ(a[k].hess, c[k].hess);
    EXPECT_EQ(a[k].count, c[k].count);
  }
  // Counts per feature add up to the row count.
  for (std::size_t f = 0; f < b.features(); ++f) {
    std::uint32_t n = 0;
    for (std::size_t k = b.offsets[f]; k < b.offsets[f + 1]; ++k) n += a[k].count;
    EXPECT_EQ(n, rows.size());
  }
}

TEST(Kernels, EnsembleMarginMatchesSerialExactly) {
  Rng rng(2);
  const std::size_t cols = 6, n = 3000;
  std::vector<Tree> trees;
  for (int t = 0; t < 20; ++t) trees.push_back(random_tree(cols, 5, rng));
  std::vector<double> x(n * cols);
  for (auto& v : x) v = uniform_unit(rng);
  std::vector<double> a(n, 0.25), c(n, 0.25);
  serial::ensemble_margin(trees, 0.1, x, cols, a);
  with_threads(4, [&] { omp::ensemble_margin(trees, 0.1, x, cols, c); });
  EXPECT_EQ(a, c);
  // Spot-check one row against a direct tree walk.
  double direct = 0.25, sum = 0.0;
  for (const auto& t : trees) sum += t.predict(std::span<const double>(x).subspan(0, cols));
  direct += 0.1 * sum;
  EXPECT_NEAR(a[0], direct, 1e-12);
}

TEST(Kernels, LogisticLossMatchesSerialAndIsThreadCountInvariant) {
  Rng rng(3);
  const std::size_t cols = 5, n = 9000;
  std::vector<double> z(n * cols), w(cols);
  std::vector<std::uint8_t> y(n);
  for (auto& v : z) v = uniform_unit(rng) * 4 - 2;
  for (auto& v : w) v = uniform_unit(rng) - 0.5;
  for (auto& v : y) v = uniform_index(rng, 2);
  std::vector<double> gs(cols), g1(cols), g4(cols);
  const auto s = serial::logistic_loss_grad(z, cols, y, w, 0.3, gs);
  serial::LossAndInterceptGrad o1, o4;
  with_threads(1, [&] { o1 = omp::logistic_loss_grad(z, cols, y, w, 0.3, g1); });
  with_threads(4, [&] { o4 = omp::logistic_loss_grad(z, cols, y, w, 0.3, g4); });
  EXPECT_EQ(o1.loss, o4.loss);
  EXPECT_EQ(o1.grad_intercept, o4.grad_intercept);
  EXPECT_EQ(g1, g4);
  EXPECT_NEAR(o1.loss, s.loss, 1e-9 * std::abs(s.loss));
  EXPECT_NEAR(o1.grad_intercept, s.grad_intercept, 1e-9 * n);
  for (std::size_t j = 0; j < cols; ++j) EXPECT_NEAR(g1[j], gs[j], 1e-9 * n);
  // Direct loss oracle.
  double loss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double m = 0.3;
    for (std::size_t j = 0; j < cols; ++j) m += w[j] * z[i * cols + j];
    loss += std::log(1 + std::exp(m)) - y[i] * m;
  }
  EXPECT_NEAR(s.loss, loss, 1e-8 * loss);
}

TEST(Kernels, ClassifyOrdinalsMatchesAssign) {
  std::vector<int> orig, act;
  for (int o = Period(1, 2022).ordinal(); o <= Period(12, 2025).ordinal(); ++o) {
    for (int a = o - 2; a <= Period(12, 2025).ordinal(); ++a) {
      orig.push_back(o);
      act.push_back(a);
    }
  }
  const Cutoffs c{};
  std::vector<std::uint8_t> s(orig.size()), p(orig.size());
  serial::classify_ordinals(orig, act, c.validation_start.ordinal(), c.test_start.ordinal(), s);
  with_threads(3, [&] {
    omp::classify_ordinals(orig, act, c.validation_start.ordinal(), c.test_start.ordinal(), p);
  });
  EXPECT_EQ(s, p);
  for (std::size_t i = 0; i < orig.size(); ++i) {
    if (act[i] < orig[i]) {
      EXPECT_EQ(s[i], kInvalidOrdering);
    } else {
      EXPECT_EQ(s[i], static_cast<std::uint8_t>(
                          assign(Period::from_ordinal(orig[i]), Period::from_ordinal(act[i]), c)));
    }
  }
}

TEST(Kernels, StableLinkFunctions) {
  EXPECT_DOUBLE_EQ(softplus(0.0), std::log(2.0));
  EXPECT_DOUBLE_EQ(softplus(800.0), 800.0);
  EXPECT_GT(softplus(-800.0), -1.0);
  EXPECT_DOUBLE_EQ(sigmoid(0.0), 0.5);
  EXPECT_EQ(sigmoid(-800.0), 0.0);
  EXPECT_EQ(sigmoid(800.0), 1.0);
  for (double m = -30; m <= 30; m += 0.7) EXPECT_NEAR(sigmoid(m) + sigmoid(-m), 1.0, 1e-15);
}
