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

#include "mdb/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "mdb/eval.hpp"

namespace mdb {

GbdtParams GbdtParams::from(const Hyperparams& hp) {
  GbdtParams p;
  const auto get_int = [&](std::string_view k, int& out) {
    if (auto it = hp.find(k); it != hp.end()) out = static_cast<int>(it->second);
  };
  const auto get = [&](std::string_view k, double& out) {
    if (auto it = hp.find(k); it != hp.end()) out = it->second;
  };
  get_int("num_iterations", p.num_iterations);
  get("learning_rate", p.learning_rate);
  get_int("max_depth", p.max_depth);
  get("lambda", p.lambda);
  get_int("max_bins", p.max_bins);
  get_int("early_stopping_patience", p.early_stopping_patience);
  get_int("min_data_in_leaf", p.min_data_in_leaf);
  get("min_sum_hessian", p.min_sum_hessian);
  get("min_split_gain", p.min_split_gain);
  get("cat_smooth", p.cat_smooth);
  get("cat_l2", p.cat_l2);
  get_int("min_data_per_group", p.min_data_per_group);
  if (p.num_iterations < 1) throw PreconditionError("gbdt num_iterations must be >= 1");
  if (p.learning_rate < 0) throw PreconditionError("gbdt learning_rate must be >= 0");
  if (p.max_depth < 0) throw PreconditionError("gbdt max_depth must be >= 0");
  if (p.lambda < 0) throw PreconditionError("gbdt lambda must be >= 0");
  if (p.max_bins < 2 || p.max_bins > 65535) throw PreconditionError("gbdt max_bins must be in 2..65535");
  if (p.min_data_in_leaf < 1) throw PreconditionError("gbdt min_data_in_leaf must be >= 1");
  if (p.cat_smooth < 0 || p.cat_l2 < 0) throw PreconditionError("gbdt cat_smooth and cat_l2 must be >= 0");
  if (p.min_data_per_group < 1) throw PreconditionError("gbdt min_data_per_group must be >= 1");
  return p;
}

Hyperparams GbdtParams::to_hyperparams() const {
  return {{"num_iterations", double(num_iterations)},
          {"learning_rate", learning_rate},
          {"max_depth", double(max_depth)},
          {"lambda", lambda},
          {"max_bins", double(max_bins)},
          {"early_stopping_patience", double(early_stopping_patience)},
          {"min_data_in_leaf", double(min_data_in_leaf)},
          {"min_sum_hessian", min_sum_hessian},
          {"min_split_gain", min_split_gain},
          {"cat_smooth", cat_smooth},
          {"cat_l2", cat_l2},
          {"min_data_per_group", double(min_data_per_group)}};
}

double logistic_loss(double margin, std::uint8_t label) {
  return kernels::softplus(margin) - static_cast<double>(label) * margin;
}

kernels::GradPair logistic_grad_hess(double margin, std::uint8_t label) {
  const double p = kernels::sigmoid(margin);
  return {p - static_cast<double>(label), p * (1.0 - p)};
}

// ---------------------------------------------------------------------------
// Binning

BinMapper BinMapper::fit(const FeatureMatrix& x, int max_bins) {
  const std::size_t n = x.rows(), p = x.cols();
  BinMapper m;
  m.categorical_.resize(p);
  m.cuts_.resize(p);
  m.category_bins_.assign(p, 0);
  std::vector<double> col(n);
  for (std::size_t f = 0; f < p; ++f) {
    if (x.columns[f].kind == FeatureKind::RawCategorical) {
      m.categorical_[f] = true;
      m.category_bins_[f] = x.columns[f].categories.size() + 1;
      if (m.category_bins_[f] > 65535) {
        throw PreconditionError("too many categories in column " + x.columns[f].name);
      }
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) col[i] = x.at(i, f);
    std::sort(col.begin(), col.end());
    std::vector<double> uniq = col;
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    auto& cuts = m.cuts_[f];
    if (uniq.size() <= static_cast<std::size_t>(max_bins)) {
      cuts = std::move(uniq);
    } else {
      // Equal-frequency cut points, deduplicated; the maximum closes the
      // last bin.
      for (int k = 1; k <= max_bins; ++k) {
        const std::size_t idx = (static_cast<std::size_t>(k) * n + max_bins - 1) / max_bins - 1;
        const double v = col[std::min(idx, n - 1)];
        if (cuts.empty() || v > cuts.back()) cuts.push_back(v);
      }
      if (cuts.back() < col.back()) cuts.push_back(col.back());
    }
    if (cuts.empty()) cuts.push_back(0.0);
  }
  return m;
}

std::size_t BinMapper::bins(std::size_t f) const {
  return categorical_[f] ? category_bins_[f] : cuts_[f].size();
}

kernels::BinnedMatrix BinMapper::transform(const FeatureMatrix& x) const {
  kernels::BinnedMatrix b;
  b.rows = x.rows();
  const std::size_t p = x.cols();
  b.offsets.assign(p + 1, 0);
  for (std::size_t f = 0; f < p; ++f) b.offsets[f + 1] = b.offsets[f] + static_cast<std::uint32_t>(bins(f));
  b.codes.resize(p * b.rows);
  for (std::size_t f = 0; f < p; ++f) {
    const std::size_t last = bins(f) - 1;
    for (std::size_t i = 0; i < b.rows; ++i) {
      const double v = x.at(i, f);
      std::size_t code;
      if (categorical_[f]) {
        const long c = std::lround(v);
        code = (c < 0 || static_cast<std::size_t>(c) > last) ? last : static_cast<std::size_t>(c);
      } else {
        const auto& cuts = cuts_[f];
        code = static_cast<std::size_t>(std::lower_bound(cuts.begin(), cuts.end(), v) - cuts.begin());
        code = std::min(code, last);
      }
      b.codes[f * b.rows + i] = static_cast<std::uint16_t>(code);
    }
  }
  return b;
}

// ---------------------------------------------------------------------------
// Early stopping

bool EarlyStopping::update(std::size_t iteration, double value) {
  if (!seen_ || value > best_value_) {
    seen_ = true;
    best_value_ = value;
    best_iteration_ = iteration;
  }
  return patience_ > 0 && iteration - best_iteration_ >= static_cast<std::size_t>(patience_);
}

// ---------------------------------------------------------------------------
// Tree growth

namespace {

struct SplitChoice {
  bool found = false;
  double gain = 0.0;
  std::size_t feature = 0;
  std::size_t bin = 0;                       // numeric: left = codes <= bin
  std::vector<std::int32_t> left_categories;  // categorical
};

struct NodeWork {
  std::size_t node;
  std::vector<std::uint32_t> rows;
  int depth;
  double grad;
  double hess;
};

inline double leaf_score(double g, double h, double lambda) { return g * g / (h + lambda); }

void scan_numeric(std::span<const kernels::HistBin> hist, std::size_t f, const NodeWork& w,
                  const GbdtParams& prm, SplitChoice& best) {
  const double parent = leaf_score(w.grad, w.hess, prm.lambda);
  const std::size_t total = w.rows.size();
  double gl = 0, hl = 0;
  std::size_t cl = 0;
  for (std::size_t b = 0; b + 1 < hist.size(); ++b) {
    gl += hist[b].grad;
    hl += hist[b].hess;
    cl += hist[b].count;
    const std::size_t cr = total - cl;
    if (cl < static_cast<std::size_t>(prm.min_data_in_leaf)) continue;
    if (cr < static_cast<std::size_t>(prm.min_data_in_leaf)) break;
    const double gr = w.grad - gl, hr = w.hess - hl;
    if (hl < prm.min_sum_hessian || hr < prm.min_sum_hessian) continue;
    const double gain = 0.5 * (leaf_score(gl, hl, prm.lambda) + leaf_score(gr, hr, prm.lambda) - parent);
    if (!best.found || gain > best.gain) {
      best.found = true;
      best.gain = gain;
      best.feature = f;
      best.bin = b;
      best.left_categories.clear();
    }
  }
}

// Categories with at least min_data_per_group rows in the node are ordered by
// grad / (hess + cat_smooth) and every prefix of that order is a candidate
// left set; sparser categories always go right. Gains use lambda + cat_l2.
void scan_categorical(std::span<const kernels::HistBin> hist, std::size_t f, const NodeWork& w,
                      const GbdtParams& prm, SplitChoice& best) {
  std::vector<std::size_t> present;
  for (std::size_t c = 0; c < hist.size(); ++c) {
    if (hist[c].count >= static_cast<std::uint32_t>(prm.min_data_per_group)) present.push_back(c);
  }
  if (present.empty()) return;
  std::stable_sort(present.begin(), present.end(), [&](std::size_t a, std::size_t b) {
    return hist[a].grad / (hist[a].hess + prm.cat_smooth) < hist[b].grad / (hist[b].hess + prm.cat_smooth);
  });
  const double lambda = prm.lambda + prm.cat_l2;
  const double parent = leaf_score(w.grad, w.hess, lambda);
  const std::size_t total = w.rows.size();
  double gl = 0, hl = 0;
  std::size_t cl = 0;
  for (std::size_t k = 0; k < present.size(); ++k) {
    const auto& h = hist[present[k]];
    gl += h.grad;
    hl += h.hess;
    cl += h.count;
    const std::size_t cr = total - cl;
    if (cl < static_cast<std::size_t>(prm.min_data_in_leaf)) continue;
    if (cr < static_cast<std::size_t>(prm.min_data_in_leaf)) break;
    const double gr = w.grad - gl, hr = w.hess - hl;
    if (hl < prm.min_sum_hessian || hr < prm.min_sum_hessian) continue;
    const double gain = 0.5 * (leaf_score(gl, hl, lambda) + leaf_score(gr, hr, lambda) - parent);
    if (!best.found || gain > best.gain) {
      best.found = true;
      best.gain = gain;
      best.feature = f;
      best.left_categories.assign(present.begin(), present.begin() + static_cast<std::ptrdiff_t>(k + 1));
      std::sort(best.left_categories.begin(), best.left_categories.end());
    }
  }
}

}  // namespace

Tree grow_boosted_tree(const kernels::BinnedMatrix& bins, const BinMapper& mapper,
                       std::span<const kernels::GradPair> gp, const GbdtParams& prm) {
  Tree tree;
  tree.nodes.emplace_back();
  std::vector<kernels::HistBin> hist(bins.total_bins());

  NodeWork root{0, {}, 0, 0.0, 0.0};
  root.rows.resize(bins.rows);
  for (std::uint32_t i = 0; i < bins.rows; ++i) {
    root.rows[i] = i;
    root.grad += gp[i].grad;
    root.hess += gp[i].hess;
  }
  std::deque<NodeWork> queue;
  queue.push_back(std::move(root));

  while (!queue.empty()) {
    NodeWork w = std::move(queue.front());
    queue.pop_front();
    tree.nodes[w.node].value = -w.grad / (w.hess + prm.lambda);
    if (w.depth >= prm.max_depth ||
        w.rows.size() < 2 * static_cast<std::size_t>(prm.min_data_in_leaf)) {
      continue;
    }

    kernels::omp::build_histograms(bins, w.rows, gp, hist);
    SplitChoice best;
    for (std::size_t f = 0; f < bins.features(); ++f) {
      const std::span<const kernels::HistBin> hf(hist.data() + bins.offsets[f], bins.bins(f));
      if (mapper.categorical(f)) {
        scan_categorical(hf, f, w, prm, best);
      } else {
        scan_numeric(hf, f, w, prm, best);
      }
    }
    if (!best.found || !(best.gain > prm.min_split_gain) || !(best.gain > 1e-12)) continue;

    NodeWork left{0, {}, w.depth + 1, 0.0, 0.0};
    NodeWork right{0, {}, w.depth + 1, 0.0, 0.0};
    const bool cat = mapper.categorical(best.feature);
    for (const std::uint32_t r : w.rows) {
      const std::uint16_t code = bins.code(best.feature, r);
      const bool goes_left = cat ? std::binary_search(best.left_categories.begin(),
                                                      best.left_categories.end(),
                                                      static_cast<std::int32_t>(code))
                                 : code <= best.bin;
      NodeWork& dst = goes_left ? left : right;
      dst.rows.push_back(r);
      dst.grad += gp[r].grad;
      dst.hess += gp[r].hess;
    }
    const auto li = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    TreeNode& node = tree.nodes[w.node];
    node.feature = static_cast<std::int32_t>(best.feature);
    node.left = li;
    node.right = li + 1;
    if (cat) {
      node.categorical = true;
      node.left_categories = std::move(best.left_categories);
    } else {
      node.threshold = mapper.cuts(best.feature)[best.bin];
    }
    left.node = static_cast<std::size_t>(li);
    right.node = static_cast<std::size_t>(li + 1);
    queue.push_back(std::move(left));
    queue.push_back(std::move(right));
  }
  return tree;
}

// ---------------------------------------------------------------------------
// Boosting

FittedModel fit_gbdt(const FeatureMatrix& x, const FeatureMatrix& validation, const GbdtParams& prm,
                     std::uint64_t seed, const ValidationMetric& metric) {
  check_training_data(x, "gbdt");
  if (validation.rows() == 0) throw PreconditionError("gbdt: validation set is empty");
  if (validation.positives() == 0 || validation.negatives() == 0) {
    throw PreconditionError("gbdt: validation set needs both classes");
  }
  if (validation.columns != x.columns) {
    throw PreconditionError("gbdt: validation columns differ from training columns");
  }
  const ValidationMetric score =
      metric ? metric
             : ValidationMetric([](std::size_t, std::span<const double> m, std::span<const std::uint8_t> y) {
                 return auroc(m, y);
               });

  const BinMapper mapper = BinMapper::fit(x, prm.max_bins);
  const kernels::BinnedMatrix bins = mapper.transform(x);
  const std::size_t n = x.rows(), p = x.cols();
  const double rate = static_cast<double>(x.positives()) / static_cast<double>(n);
  const double base = std::log(rate / (1.0 - rate));

  std::vector<double> margin(n, base), val_margin(validation.rows(), base);
  std::vector<kernels::GradPair> gp(n);
  std::vector<Tree> trees;
  EarlyStopping stopper(prm.early_stopping_patience);
  TrainingMetadata meta;

  for (int it = 1; it <= prm.num_iterations; ++it) {
    for (std::size_t i = 0; i < n; ++i) gp[i] = logistic_grad_hess(margin[i], x.labels[i]);
    Tree tree = grow_boosted_tree(bins, mapper, gp, prm);
    if (tree.nodes.size() == 1) {
      meta.converged = true;
      break;
    }
    const std::span<const Tree> one(&tree, 1);
    kernels::omp::ensemble_margin(one, prm.learning_rate, x.values, p, margin);
    kernels::omp::ensemble_margin(one, prm.learning_rate, validation.values, p, val_margin);
    trees.push_back(std::move(tree));

    const double v = score(static_cast<std::size_t>(it), val_margin, validation.labels);
    meta.validation_trace.push_back(v);
    meta.stopping_iteration = static_cast<std::size_t>(it);
    if (stopper.update(static_cast<std::size_t>(it), v)) break;
  }

  if (!trees.empty()) {
    trees.resize(stopper.best_iteration());
    meta.best_iteration = stopper.best_iteration();
    meta.best_validation_auroc = stopper.best_value();
  } else {
    meta.best_iteration = 0;
    meta.stopping_iteration = 0;
  }
  meta.iterations = trees.size();

  BoostedState state{std::move(trees), base, prm.learning_rate};
  return FittedModel(LearnerKind::Gbdt, prm.to_hyperparams(), seed, x.column_names(), std::move(state),
                     std::move(meta));
}

}  // namespace mdb
