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
#include "mdb/kernels.hpp"
#include "mdb/logreg.hpp"
#include "support.hpp"

using namespace mdb;

namespace {

const LinearState& linear(const FittedModel& m) { return std::get<LinearState>(m.state()); }

}  // namespace

TEST(LogRegObjective, GradientMatchesFiniteDifferences) {
  Rng rng(1);
  const std::size_t n = 200, p = 4;
  std::vector<double> z(n * p), w(p);
  std::vector<std::uint8_t> y(n);
  for (auto& v : z) v = uniform_unit(rng) * 2 - 1;
  for (auto& v : w) v = uniform_unit(rng) - 0.5;
  for (auto& v : y) v = uniform_index(rng, 2);
  const double b = 0.2, C = 0.7, h = 1e-6;
  for (const Penalty pen : {Penalty::L1, Penalty::L2}) {
    std::vector<double> g(p);
    const double gb = logreg_smooth_gradient(z, p, y, w, b, pen, C, g);
    // The smooth part excludes the L1 term, so differentiate objective minus
    // the penalty for L1 and the full objective for L2.
    const auto smooth = [&](std::span<const double> ww, double bb) {
      double f = logreg_objective(z, p, y, ww, bb, pen, C);
      if (pen == Penalty::L1) {
        for (const double v : ww) f -= std::abs(v) / C;
      }
      return f;
    };
    for (std::size_t j = 0; j < p; ++j) {
      auto wp = w, wm = w;
      wp[j] += h;
      wm[j] -= h;
      EXPECT_NEAR(g[j], (smooth(wp, b) - smooth(wm, b)) / (2 * h), 1e-5);
    }
    EXPECT_NEAR(gb, (smooth(w, b + h) - smooth(w, b - h)) / (2 * h), 1e-5);
  }
}

TEST(LogRegObjective, PenaltyDefinitions) {
  const std::vector<double> z{0, 0};
  const std::vector<std::uint8_t> y{1, 0};
  const std::vector<double> w{2.0};
  // Loss at m = 0 is log 2 per row.
  const double loss = 2 * std::log(2.0);
  EXPECT_NEAR(logreg_objective(z, 1, y, w, 0.0, Penalty::L1, 4.0), loss + 2.0 / 4.0, 1e-12);
  EXPECT_NEAR(logreg_objective(z, 1, y, w, 0.0, Penalty::L2, 4.0), loss + 0.5 * 4.0 / 4.0, 1e-12);
}

TEST(LogReg, ObjectiveTraceIsMonotone) {
  const FeatureMatrix x = mdbtest::planted_matrix(600, 5, 3, 1.5);
  for (const Penalty pen : {Penalty::L1, Penalty::L2}) {
    const FittedModel m = fit_logreg(x, pen, LogRegParams{});
    const auto& tr = m.metadata().objective_trace;
    ASSERT_GE(tr.size(), 2u);
    for (std::size_t k = 1; k < tr.size(); ++k) EXPECT_LE(tr[k], tr[k - 1] + 1e-12 * std::abs(tr[k - 1]));
    EXPECT_TRUE(m.metadata().converged);
  }
}

TEST(LogReg, StrongL1ZeroesEveryCoefficient) {
  const FeatureMatrix x = mdbtest::planted_matrix(400, 6, 5, 2.0);
  LogRegParams p;
  p.C = 1e-6;
  const FittedModel m = fit_logreg(x, Penalty::L1, p);
  for (const double c : linear(m).coef) EXPECT_EQ(c, 0.0);
  // The intercept alone then matches the base rate.
  const double rate = static_cast<double>(x.positives()) / x.rows();
  EXPECT_NEAR(kernels::sigmoid(linear(m).intercept), rate, 1e-3);
  // With zero coefficients every row scores sigmoid(intercept).
  for (const double s : m.predict_proba(x)) EXPECT_DOUBLE_EQ(s, kernels::sigmoid(linear(m).intercept));
}

TEST(LogReg, OneFeatureCoefficientSignFollowsTheSignal) {
  for (const double weight : {1.5, -1.5}) {
    const FeatureMatrix x = mdbtest::planted_matrix(800, 1, 7, weight);
    for (const Penalty pen : {Penalty::L1, Penalty::L2}) {
      const FittedModel m = fit_logreg(x, pen, LogRegParams{});
      EXPECT_EQ(linear(m).coef[0] > 0, weight > 0);
    }
  }
}

TEST(LogReg, L1IsSparserThanL2OnNoiseFeatures) {
  const FeatureMatrix x = mdbtest::planted_matrix(300, 20, 9, 1.5);
  LogRegParams p;
  p.C = 0.05;
  const auto zeros = [](const FittedModel& m) {
    std::size_t k = 0;
    for (const double c : linear(m).coef) k += c == 0.0;
    return k;
  };
  EXPECT_GT(zeros(fit_logreg(x, Penalty::L1, p)), zeros(fit_logreg(x, Penalty::L2, p)));
}

TEST(LogReg, LearnsPlantedSignal) {
  const FeatureMatrix train = mdbtest::planted_matrix(2000, 4, 11, 1.5);
  const FeatureMatrix test = mdbtest::planted_matrix(2000, 4, 12, 1.5);
  const FittedModel m = fit_logreg(train, Penalty::L2, LogRegParams{});
  const auto s = m.predict_proba(test);
  EXPECT_GT(auroc(s, test.labels), 0.8);
  EXPECT_NEAR(auroc(s, test.labels), mdbtest::pairwise_auroc(s, test.labels), 1e-12);
}

TEST(Standardizer, CentersAndScalesWithConstantColumnsUnscaled) {
  const FeatureMatrix x = mdbtest::numeric_matrix({{1, 5}, {3, 5}, {5, 5}}, {1, 0, 1});
  const Standardizer s = Standardizer::fit(x);
  EXPECT_DOUBLE_EQ(s.center[0], 3.0);
  EXPECT_DOUBLE_EQ(s.scale[1], 1.0);
  const auto z = s.apply(x);
  EXPECT_DOUBLE_EQ(z[0] + z[2] + z[4], 0.0);
  EXPECT_DOUBLE_EQ(z[1], 0.0);
}

TEST(LogReg, RejectsBadInput) {
  LogRegParams p;
  p.C = 0;
  const FeatureMatrix x = mdbtest::planted_matrix(50, 2, 1);
  EXPECT_THROW(fit_logreg(x, Penalty::L1, p), PreconditionError);
  const FeatureMatrix one_class = mdbtest::numeric_matrix({{1}, {2}}, {0, 0});
  EXPECT_THROW(fit_logreg(one_class, Penalty::L2, LogRegParams{}), PreconditionError);
  FeatureMatrix nan = mdbtest::numeric_matrix({{1}, {std::nan("")}}, {0, 1});
  EXPECT_THROW(fit_logreg(nan, Penalty::L2, LogRegParams{}), PreconditionError);
  FeatureMatrix raw = mdbtest::numeric_matrix({{0}, {1}}, {0, 1});
  raw.columns[0].kind = FeatureKind::RawCategorical;
  raw.columns[0].categories = {"a", "b"};
  EXPECT_THROW(fit_logreg(raw, Penalty::L2, LogRegParams{}), PreconditionError);
}
