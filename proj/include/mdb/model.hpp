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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mdb/encoder.hpp"
#include "mdb/feature_matrix.hpp"
#include "mdb/tree.hpp"

namespace mdb {

enum class LearnerKind { LogRegL1, LogRegL2, RandomForest, Gbdt };

std::string_view learner_kind_name(LearnerKind k);
LearnerKind parse_learner_kind(std::string_view text);

using Hyperparams = std::map<std::string, double, std::less<>>;

// Defaults per kind:
//   LogRegL1/L2   C=1 max_epochs=1000 tolerance=1e-8
//   RandomForest  n_trees=150 min_samples_split=8 max_depth=15 max_features=0 (ceil sqrt p)
//   Gbdt          num_iterations=200 learning_rate=0.05 max_depth=8 lambda=1
//                 max_bins=256 early_stopping_patience=20 min_data_in_leaf=20
//                 min_sum_hessian=1e-3 min_split_gain=0 cat_smooth=10 cat_l2=10
//                 min_data_per_group=100
Hyperparams default_hyperparams(LearnerKind kind);

struct LearnerSpec {
  std::string name;
  LearnerKind kind = LearnerKind::Gbdt;
  Hyperparams hyperparams;
  std::uint64_t seed = 0;
  // Encoding fed to this learner. Only Gbdt accepts RawCategorical.
  Pathway pathway = Pathway::OneHot;

  // Defaults for `kind` overlaid with `overrides`; unknown names throw.
  static LearnerSpec make(std::string name, LearnerKind kind, const Hyperparams& overrides = {},
                          std::uint64_t seed = 0, Pathway pathway = Pathway::OneHot);
  double param(std::string_view key) const;
};

// Coefficients live in standardized space: z_j = (x_j - center_j) / scale_j.
struct LinearState {
  std::vector<double> center;
  std::vector<double> scale;
  std::vector<double> coef;
  double intercept = 0.0;
};

// Leaves hold positive-class fractions; prediction is their mean.
struct ForestState {
  std::vector<Tree> trees;
};

// Leaves hold Newton weights -G/(H + lambda); the margin is
// base_score + learning_rate * sum of leaf weights.
struct BoostedState {
  std::vector<Tree> trees;
  double base_score = 0.0;
  double learning_rate = 0.0;
};

struct TrainingMetadata {
  // Epochs for logistic regression, trees kept for ensembles.
  std::size_t iterations = 0;
  bool converged = false;
  // Boosting only.
  std::optional<std::size_t> best_iteration;
  std::optional<double> best_validation_auroc;
  std::optional<std::size_t> stopping_iteration;
  // Objective after each logistic regression epoch, starting with the initial
  // point.
  std::vector<double> objective_trace;
  // Validation metric after each boosting iteration (1-based iteration i at
  // index i - 1).
  std::vector<double> validation_trace;
};

class FittedModel {
 public:
  using State = std::variant<LinearState, ForestState, BoostedState>;

  FittedModel(LearnerKind kind, Hyperparams hyperparams, std::uint64_t seed,
              std::vector<std::string> columns, State state, TrainingMetadata meta);

  LearnerKind kind() const { return kind_; }
  const Hyperparams& hyperparams() const { return hyperparams_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<std::string>& columns() const { return columns_; }
  const State& state() const { return state_; }
  const TrainingMetadata& metadata() const { return meta_; }

  // Throws PreconditionError listing missing and extra columns when X does
  // not match the training columns.
  std::vector<double> predict_proba(const FeatureMatrix& x) const;
  // Raw score before the link (log-odds for logistic and boosted models,
  // probability for forests).
  std::vector<double> predict_margin(const FeatureMatrix& x) const;

  void check_columns(const FeatureMatrix& x) const;

 private:
  LearnerKind kind_;
  Hyperparams hyperparams_;
  std::uint64_t seed_;
  std::vector<std::string> columns_;
  State state_;
  TrainingMetadata meta_;
};

// Fits the learner. `validation` is required for Gbdt (early stopping) and
// ignored otherwise.
FittedModel fit(const LearnerSpec& spec, const FeatureMatrix& train, const FeatureMatrix& validation);

// Self-describing JSON with a versioned format tag; load(save(m)) predicts
// bit-identically to m.
inline constexpr std::string_view kModelFormat = "mdb-model/1";
std::string save_model(const FittedModel& model);
FittedModel load_model(std::string_view json_text);
void save_model_file(const FittedModel& model, const std::filesystem::path& path);
FittedModel load_model_file(const std::filesystem::path& path);

// Throws PreconditionError unless every value is finite and both classes are
// present.
void check_training_data(const FeatureMatrix& x, std::string_view who);

}  // namespace mdb
