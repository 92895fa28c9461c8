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

#include <cmath>

#include "mdb/eval.hpp"
#include "mdb/gbdt.hpp"
#include "mdb/kernels.hpp"
#include "support.hpp"

using namespace mdb;

namespace {

const BoostedState& boosted(const FittedModel& m) { return std::get<BoostedState>(m.state()); }

GbdtParams small_params() {
  GbdtParams p;
  p.min_data_in_leaf = 1;
  p.max_depth = 1;
  p.lambda = 1.0;
  return p;
}

// One categorical column with codes 0..k-1; rows of category `hot` are
// positive with probability 0.6, others with 0.05.
FeatureMatrix categorical_matrix(std::size_t n, std::size_t k, std::size_t hot, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> rows(n, std::vector<double>(1));
  std::vector<std::uint8_t> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = uniform_index(rng, k);
    rows[i][0] = static_cast<double>(c);
    y[i] = uniform_unit(rng) < (c == hot ? 0.6 : 0.05);
  }
  FeatureMatrix m = mdbtest::numeric_matrix(rows, y);
  m.columns[0].kind = FeatureKind::RawCategorical;
  for (std::size_t c = 0; c < k; ++c) m.columns[0].categories.push_back("c" + std::to_string(c));
  return m;
}

}  // namespace

TEST(GbdtLoss, GradientAndHessianMatchFiniteDifferences) {
  const double h = 1e-5;
  for (double m = -6; m <= 6; m += 0.5) {
    for (const std::uint8_t y : {0, 1}) {
      const auto gh = logistic_grad_hess(m, y);
      const double g = (logistic_loss(m + h, y) - logistic_loss(m - h, y)) / (2 * h);
      const double hh = (logistic_loss(m + h, y) - 2 * logistic_loss(m, y) + logistic_loss(m - h, y)) / (h * h);
      EXPECT_NEAR(gh.grad, g, 1e-7);
      EXPECT_NEAR(gh.hess, hh, 1e-4);
    }
  }
}

TEST(GbdtTree, LeafWeightsAreNewtonSteps) {
  const FeatureMatrix x = mdbtest::numeric_matrix({{0}, {0}, {1}, {1}}, {1, 1, 0, 0});
  const BinMapper mapper = BinMapper::fit(x, 256);
  const auto bins = mapper.transform(x);
  const std::vector<kernels::GradPair> gp{{-1, 1}, {-1, 1}, {1, 1}, {1, 1}};
  const Tree t = grow_boosted_tree(bins, mapper, gp, small_params());
  ASSERT_EQ(t.nodes.size(), 3u);
  EXPECT_DOUBLE_EQ(t.nodes[0].threshold, 0.0);
  // -G / (H + lambda) with G = -2, H = 2 on the left and G = 2 on the right.
  EXPECT_DOUBLE_EQ(t.nodes[t.nodes[0].left].value, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(t.nodes[t.nodes[0].right].value, -2.0 / 3.0);
}

TEST(GbdtTree, SplitGainThreshold) {
  // The split above has gain 0.5 * (4/3 + 4/3 - 0) = 4/3.
  const FeatureMatrix x = mdbtest::numeric_matrix({{0}, {0}, {1}, {1}}, {1, 1, 0, 0});
  const BinMapper mapper = BinMapper::fit(x, 256);
  const auto bins = mapper.transform(x);
  const std::vector<kernels::GradPair> gp{{-1, 1}, {-1, 1}, {1, 1}, {1, 1}};
  GbdtParams p = small_params();
  p.min_split_gain = 1.3;
  EXPECT_EQ(grow_boosted_tree(bins, mapper, gp, p).nodes.size(), 3u);
  p.min_split_gain = 1.34;
  EXPECT_EQ(grow_boosted_tree(bins, mapper, gp, p).nodes.size(), 1u);
}

TEST(GbdtTree, MinDataInLeafAndDepth) {
  const FeatureMatrix x = mdbtest::planted_matrix(300, 3, 2);
  const BinMapper mapper = BinMapper::fit(x, 256);
  const auto bins = mapper.transform(x);
  std::vector<kernels::GradPair> gp(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) gp[i] = logistic_grad_hess(0.0, x.labels[i]);
  GbdtParams p;
  p.max_depth = 3;
  p.min_data_in_leaf = 30;
  const Tree t = grow_boosted_tree(bins, mapper, gp, p);
  EXPECT_LE(t.depth(), 3);
  std::vector<int> count(t.nodes.size(), 0);
  for (std::size_t i = 0; i < x.rows(); ++i) ++count[t.leaf_index(x.row(i))];
  for (std::size_t k = 0; k < t.nodes.size(); ++k) {
    if (t.nodes[k].is_leaf()) EXPECT_GE(count[k], 30);
  }
}

TEST(BinMapper, CutsAndCodes) {
  const FeatureMatrix x = mdbtest::numeric_matrix({{3}, {1}, {2}, {2}, {5}}, {0, 1, 0, 1, 0});
  const BinMapper m = BinMapper::fit(x, 256);
  EXPECT_EQ(m.cuts(0), (std::vector<double>{1, 2, 3, 5}));
  const auto b = m.transform(mdbtest::numeric_matrix({{0.5}, {2}, {2.5}, {9}}, {0, 0, 0, 0}));
  EXPECT_EQ(b.codes, (std::vector<std::uint16_t>{0, 1, 2, 3}));
  // Bin count is capped.
  const FeatureMatrix many = mdbtest::planted_matrix(5000, 1, 3);
  EXPECT_LE(BinMapper::fit(many, 16).bins(0), 16u);
}

TEST(EarlyStoppingRule, StopsAfterPatienceWithoutStrictImprovement) {
  EarlyStopping s(3);
  EXPECT_FALSE(s.update(1, 0.5));
  EXPECT_FALSE(s.update(2, 0.6));
  EXPECT_FALSE(s.update(3, 0.6));
  EXPECT_FALSE(s.update(4, 0.55));
  EXPECT_TRUE(s.update(5, 0.6));
  EXPECT_EQ(s.best_iteration(), 2u);
  EXPECT_DOUBLE_EQ(s.best_value(), 0.6);
}

TEST(Gbdt, EarlyStoppingThroughTheMetricHook) {
  const FeatureMatrix train = mdbtest::planted_matrix(400, 3, 5);
  const FeatureMatrix val = mdbtest::planted_matrix(200, 3, 6);
  GbdtParams p;
  p.num_iterations = 200;
  p.early_stopping_patience = 20;
  // Scripted metric peaking at iteration 7.
  const ValidationMetric metric = [](std::size_t it, std::span<const double>, std::span<const std::uint8_t>) {
    return -std::abs(static_cast<double>(it) - 7.0);
  };
  const FittedModel m = fit_gbdt(train, val, p, 0, metric);
  EXPECT_EQ(m.metadata().best_iteration, 7u);
  EXPECT_EQ(m.metadata().stopping_iteration, 27u);
  EXPECT_EQ(boosted(m).trees.size(), 7u);
  EXPECT_EQ(m.metadata().validation_trace.size(), 27u);
}

TEST(Gbdt, ZeroLearningRateGivesChanceAuroc) {
  const FeatureMatrix train = mdbtest::planted_matrix(400, 3, 7, 1.5);
  const FeatureMatrix val = mdbtest::planted_matrix(300, 3, 8, 1.5);
  GbdtParams p;
  p.learning_rate = 0.0;
  const FittedModel m = fit_gbdt(train, val, p);
  const auto s = m.predict_proba(val);
  EXPECT_DOUBLE_EQ(auroc(s, val.labels), 0.5);
  const double rate = static_cast<double>(train.positives()) / train.rows();
  EXPECT_NEAR(s[0], rate, 1e-12);
}

TEST(Gbdt, MarginIsBasePlusScaledLeafSum) {
  const FeatureMatrix train = mdbtest::planted_matrix(500, 3, 9, 1.5);
  const FeatureMatrix val = mdbtest::planted_matrix(300, 3, 10, 1.5);
  GbdtParams p;
  p.num_iterations = 15;
  const FittedModel m = fit_gbdt(train, val, p);
  const auto& st = boosted(m);
  const FeatureMatrix three = val.select(std::vector<std::size_t>{0, 1, 2});
  const auto margins = m.predict_margin(three);
  for (std::size_t i = 0; i < 3; ++i) {
    double sum = 0;
    for (const auto& t : st.trees) {
      std::size_t k = 0;
      while (!t.nodes[k].is_leaf()) {
        const auto& nd = t.nodes[k];
        k = static_cast<std::size_t>(three.at(i, nd.feature) <= nd.threshold ? nd.left : nd.right);
      }
      sum += t.nodes[k].value;
    }
    EXPECT_NEAR(margins[i], st.base_score + st.learning_rate * sum, 1e-12);
  }
  EXPECT_DOUBLE_EQ(st.base_score, std::log(double(train.positives()) / train.negatives()));
}

TEST(Gbdt, ConstantFeaturesStopAtTheRoot) {
  const FeatureMatrix train = mdbtest::numeric_matrix({{1, 2}, {1, 2}, {1, 2}, {1, 2}}, {1, 0, 0, 0});
  const FittedModel m = fit_gbdt(train, train, GbdtParams{});
  EXPECT_TRUE(boosted(m).trees.empty());
  EXPECT_TRUE(m.metadata().converged);
  for (const double s : m.predict_proba(train)) EXPECT_NEAR(s, 0.25, 1e-12);
}

TEST(Gbdt, LearnsPlantedSignal) {
  const FeatureMatrix train = mdbtest::planted_matrix(3000, 5, 11, 1.5);
  const FeatureMatrix val = mdbtest::planted_matrix(1500, 5, 12, 1.5);
  const FeatureMatrix test = mdbtest::planted_matrix(3000, 5, 13, 1.5);
  const FittedModel m = fit_gbdt(train, val, GbdtParams{});
  EXPECT_GT(auroc(m.predict_proba(test), test.labels), 0.8);
}

TEST(Gbdt, RawCategoricalSplitIsolatesTheRiskyCategory) {
  const FeatureMatrix train = categorical_matrix(4000, 6, 3, 1);
  const FeatureMatrix val = categorical_matrix(2000, 6, 3, 2);
  GbdtParams p;
  p.num_iterations = 30;
  p.early_stopping_patience = 0;
  const FittedModel m = fit_gbdt(train, val, p);
  const auto& root = boosted(m).trees.at(0).nodes.at(0);
  ASSERT_TRUE(root.categorical);
  // Category 3 is separated from every other category.
  const bool three_left = root.goes_left(3.0);
  for (int c = 0; c < 6; ++c) {
    if (c != 3) EXPECT_NE(root.goes_left(c), three_left) << c;
  }
  // The unseen code shares a side with the common categories.
  EXPECT_FALSE(root.goes_left(6.0));
  const FeatureMatrix test = categorical_matrix(3000, 6, 3, 3);
  // Bayes-optimal AUROC for this design is about 0.814.
  EXPECT_GT(auroc(m.predict_proba(test), test.labels), 0.78);
}

TEST(Gbdt, SparseCategoriesNeverJoinALeftSet) {
  // Category 5 is rare (< min_data_per_group rows) and always positive.
  FeatureMatrix train = categorical_matrix(3000, 5, 1, 4);
  train.columns[0].categories.push_back("rare");
  for (std::size_t i = 0; i < 50; ++i) {
    train.values.push_back(5.0);
    train.labels.push_back(1);
    train.keys.push_back(train.keys[0]);
  }
  const FittedModel m = fit_gbdt(train, train, GbdtParams{});
  for (const auto& t : boosted(m).trees) {
    for (const auto& nd : t.nodes) {
      if (nd.categorical) EXPECT_FALSE(nd.goes_left(5.0));
    }
  }
}

TEST(Gbdt, ValidatesInputs) {
  const FeatureMatrix train = mdbtest::planted_matrix(100, 2, 1);
  const FeatureMatrix other = mdbtest::planted_matrix(100, 3, 1);
  EXPECT_THROW(fit_gbdt(train, other, GbdtParams{}), PreconditionError);
  const FeatureMatrix one_class = mdbtest::numeric_matrix({{1, 1}, {2, 2}}, {0, 0});
  EXPECT_THROW(fit_gbdt(train, one_class, GbdtParams{}), PreconditionError);
  Hyperparams bad{{"cat_l2", -1}};
  EXPECT_THROW(GbdtParams::from(bad), PreconditionError);
}

TEST(Gbdt, Deterministic) {
  const FeatureMatrix train = mdbtest::planted_matrix(800, 4, 14);
  const FeatureMatrix val = mdbtest::planted_matrix(400, 4, 15);
  const FittedModel a = fit_gbdt(train, val, GbdtParams{});
  const FittedModel b = fit_gbdt(train, val, GbdtParams{});
  EXPECT_EQ(boosted(a).trees, boosted(b).trees);
}
