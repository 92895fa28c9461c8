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

#include "mdb/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mdb {

ForestParams ForestParams::from(const Hyperparams& hp) {
  ForestParams p;
  const auto get = [&](std::string_view k, int& out) {
    if (auto it = hp.find(k); it != hp.end()) out = static_cast<int>(it->second);
  };
  get("n_trees", p.n_trees);
  get("min_samples_split", p.min_samples_split);
  get("max_depth", p.max_depth);
  get("max_features", p.max_features);
  if (p.n_trees < 1) throw PreconditionError("random forest n_trees must be >= 1");
  if (p.max_depth < 0) throw PreconditionError("random forest max_depth must be >= 0");
  if (p.max_features < 0) throw PreconditionError("random forest max_features must be >= 0");
  return p;
}

int ForestParams::features_per_node(std::size_t p) const {
  if (max_features > 0) return std::min<int>(max_features, static_cast<int>(p));
  return static_cast<int>(std::ceil(std::sqrt(static_cast<double>(p))));
}

double weighted_gini(double n_left, double pos_left, double n_right, double pos_right) {
  const auto gini_mass = [](double n, double pos) {
    if (n <= 0) return 0.0;
    const double q = pos / n;
    return n * 2.0 * q * (1.0 - q);
  };
  return (gini_mass(n_left, pos_left) + gini_mass(n_right, pos_right)) / (n_left + n_right);
}

namespace {

struct Candidate {
  bool found = false;
  std::size_t feature = 0;
  double threshold = 0.0;
  double impurity = 0.0;
};

struct PendingNode {
  std::size_t node;
  std::vector<std::size_t> rows;
  int depth;
};

// Best threshold on one feature; returns false when the feature is constant
// on these rows.
bool best_threshold(const FeatureMatrix& x, std::span<const std::size_t> rows, std::size_t f,
                    std::vector<std::pair<double, std::uint8_t>>& buf, Candidate& best) {
  buf.clear();
  for (const std::size_t r : rows) buf.emplace_back(x.at(r, f), x.labels[r]);
  std::sort(buf.begin(), buf.end());
  if (buf.front().first == buf.back().first) return false;
  const double n = static_cast<double>(buf.size());
  double total_pos = 0;
  for (const auto& e : buf) total_pos += e.second;
  double left_pos = 0;
  for (std::size_t k = 0; k + 1 < buf.size(); ++k) {
    left_pos += buf[k].second;
    if (buf[k].first == buf[k + 1].first) continue;
    const double nl = static_cast<double>(k + 1);
    const double imp = weighted_gini(nl, left_pos, n - nl, total_pos - left_pos);
    if (!best.found || imp < best.impurity) {
      double thr = 0.5 * (buf[k].first + buf[k + 1].first);
      if (thr >= buf[k + 1].first) thr = buf[k].first;
      best = {true, f, thr, imp};
    }
  }
  return true;
}

}  // namespace

Tree fit_gini_tree(const FeatureMatrix& x, std::span<const std::size_t> sample,
                   const ForestParams& params, Rng& rng) {
  const std::size_t p = x.cols();
  const int per_node = params.features_per_node(p);
  Tree tree;
  tree.nodes.emplace_back();
  std::vector<PendingNode> stack;
  stack.push_back({0, {sample.begin(), sample.end()}, 0});
  std::vector<std::size_t> order(p);
  std::vector<std::pair<double, std::uint8_t>> buf;

  while (!stack.empty()) {
    PendingNode work = std::move(stack.back());
    stack.pop_back();
    const double n = static_cast<double>(work.rows.size());
    double pos = 0;
    for (const std::size_t r : work.rows) pos += x.labels[r];
    tree.nodes[work.node].value = n > 0 ? pos / n : 0.0;

    const bool pure = pos == 0 || pos == n;
    if (pure || work.depth >= params.max_depth ||
        work.rows.size() < static_cast<std::size_t>(std::max(params.min_samples_split, 2))) {
      continue;
    }

    std::iota(order.begin(), order.end(), std::size_t{0});
    Candidate best;
    int scored = 0;
    for (std::size_t k = 0; k < p && scored < per_node; ++k) {
      const std::size_t j = k + uniform_index(rng, p - k);
      std::swap(order[k], order[j]);
      if (best_threshold(x, work.rows, order[k], buf, best)) ++scored;
    }
    const double parent = weighted_gini(n, pos, 0, 0);
    if (!best.found || !(best.impurity < parent)) continue;

    std::vector<std::size_t> left, right;
    for (const std::size_t r : work.rows) {
      (x.at(r, best.feature) <= best.threshold ? left : right).push_back(r);
    }
    const auto li = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    TreeNode& node = tree.nodes[work.node];
    node.feature = static_cast<std::int32_t>(best.feature);
    node.threshold = best.threshold;
    node.left = li;
    node.right = li + 1;
    stack.push_back({static_cast<std::size_t>(li + 1), std::move(right), work.depth + 1});
    stack.push_back({static_cast<std::size_t>(li), std::move(left), work.depth + 1});
  }
  return tree;
}

FittedModel fit_random_forest(const FeatureMatrix& x, const ForestParams& params, std::uint64_t seed) {
  check_training_data(x, "random forest");
  if (x.has_raw_categoricals()) {
    throw PreconditionError("random forest needs the one-hot pathway (raw categorical columns present)");
  }
  const std::size_t n = x.rows();
  std::vector<Tree> trees(static_cast<std::size_t>(params.n_trees));
  const auto nt = static_cast<std::ptrdiff_t>(trees.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t t = 0; t < nt; ++t) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(t)}));
    std::vector<std::size_t> bootstrap(n);
    for (auto& r : bootstrap) r = uniform_index(rng, n);
    trees[static_cast<std::size_t>(t)] = fit_gini_tree(x, bootstrap, params, rng);
  }

  TrainingMetadata meta;
  meta.iterations = trees.size();
  meta.converged = true;
  Hyperparams hp{{"n_trees", double(params.n_trees)},
                 {"min_samples_split", double(params.min_samples_split)},
                 {"max_depth", double(params.max_depth)},
                 {"max_features", double(params.max_features)}};
  return FittedModel(LearnerKind::RandomForest, std::move(hp), seed, x.column_names(),
                     ForestState{std::move(trees)}, std::move(meta));
}

}  // namespace mdb
