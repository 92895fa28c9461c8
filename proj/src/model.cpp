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

#include "mdb/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mdb/forest.hpp"
#include "mdb/gbdt.hpp"
#include "mdb/kernels.hpp"
#include "mdb/logreg.hpp"

namespace mdb {

using nlohmann::json;

std::string_view learner_kind_name(LearnerKind k) {
  switch (k) {
    case LearnerKind::LogRegL1: return "logreg_l1";
    case LearnerKind::LogRegL2: return "logreg_l2";
    case LearnerKind::RandomForest: return "random_forest";
    case LearnerKind::Gbdt: return "gbdt";
  }
  return "?";
}

LearnerKind parse_learner_kind(std::string_view text) {
  for (const auto k : {LearnerKind::LogRegL1, LearnerKind::LogRegL2, LearnerKind::RandomForest,
                       LearnerKind::Gbdt}) {
    if (learner_kind_name(k) == text) return k;
  }
  throw ParseError("unknown learner kind '" + std::string(text) + "'");
}

Hyperparams default_hyperparams(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::LogRegL1:
    case LearnerKind::LogRegL2:
      return {{"C", 1.0}, {"max_epochs", 1000}, {"tolerance", 1e-8}};
    case LearnerKind::RandomForest:
      return {{"n_trees", 150}, {"min_samples_split", 8}, {"max_depth", 15}, {"max_features", 0}};
    case LearnerKind::Gbdt:
      return GbdtParams{}.to_hyperparams();
  }
  return {};
}

LearnerSpec LearnerSpec::make(std::string name, LearnerKind kind, const Hyperparams& overrides,
                              std::uint64_t seed, Pathway pathway) {
  LearnerSpec s{std::move(name), kind, default_hyperparams(kind), seed, pathway};
  for (const auto& [k, v] : overrides) {
    const auto it = s.hyperparams.find(k);
    if (it == s.hyperparams.end()) {
      throw PreconditionError("unknown hyperparameter '" + k + "' for " +
                              std::string(learner_kind_name(kind)));
    }
    it->second = v;
  }
  if (pathway == Pathway::RawCategorical && kind != LearnerKind::Gbdt) {
    throw PreconditionError("only gbdt accepts the raw categorical pathway");
  }
  return s;
}

double LearnerSpec::param(std::string_view key) const {
  const auto it = hyperparams.find(key);
  if (it == hyperparams.end()) throw PreconditionError("no hyperparameter '" + std::string(key) + "'");
  return it->second;
}

void check_training_data(const FeatureMatrix& x, std::string_view who) {
  if (x.rows() < 2) throw PreconditionError(std::string(who) + ": need at least 2 rows");
  if (x.positives() == 0 || x.negatives() == 0) {
    throw PreconditionError(std::string(who) + ": labels contain a single class");
  }
  for (std::size_t i = 0; i < x.values.size(); ++i) {
    if (!std::isfinite(x.values[i])) {
      throw PreconditionError(std::string(who) + ": non-finite value in column " +
                              x.columns[i % x.cols()].name + " row " + std::to_string(i / x.cols()));
    }
  }
}

FittedModel::FittedModel(LearnerKind kind, Hyperparams hyperparams, std::uint64_t seed,
                         std::vector<std::string> columns, State state, TrainingMetadata meta)
    : kind_(kind),
      hyperparams_(std::move(hyperparams)),
      seed_(seed),
      columns_(std::move(columns)),
      state_(std::move(state)),
      meta_(std::move(meta)) {}

void FittedModel::check_columns(const FeatureMatrix& x) const {
  const std::vector<std::string> got = x.column_names();
  if (got == columns_) return;
  const std::set<std::string> want_set(columns_.begin(), columns_.end());
  const std::set<std::string> got_set(got.begin(), got.end());
  std::ostringstream os;
  os << "feature columns do not match the model";
  std::vector<std::string> missing, extra;
  std::set_difference(want_set.begin(), want_set.end(), got_set.begin(), got_set.end(),
                      std::back_inserter(missing));
  std::set_difference(got_set.begin(), got_set.end(), want_set.begin(), want_set.end(),
                      std::back_inserter(extra));
  const auto list = [&](const char* label, const std::vector<std::string>& v) {
    if (v.empty()) return;
    os << "; " << label << ":";
    for (const auto& s : v) os << ' ' << s;
  };
  list("missing", missing);
  list("extra", extra);
  if (missing.empty() && extra.empty()) os << "; column order differs";
  throw PreconditionError(os.str());
}

std::vector<double> FittedModel::predict_margin(const FeatureMatrix& x) const {
  check_columns(x);
  const std::size_t n = x.rows(), p = x.cols();
  std::vector<double> out(n, 0.0);
  if (const auto* lin = std::get_if<LinearState>(&state_)) {
    for (std::size_t i = 0; i < n; ++i) {
      double m = lin->intercept;
      for (std::size_t j = 0; j < p; ++j) m += lin->coef[j] * ((x.at(i, j) - lin->center[j]) / lin->scale[j]);
      out[i] = m;
    }
  } else if (const auto* forest = std::get_if<ForestState>(&state_)) {
    if (!forest->trees.empty()) {
      kernels::omp::ensemble_margin(forest->trees, 1.0 / static_cast<double>(forest->trees.size()),
                                    x.values, p, out);
    }
  } else {
    const auto& boosted = std::get<BoostedState>(state_);
    std::fill(out.begin(), out.end(), boosted.base_score);
    kernels::omp::ensemble_margin(boosted.trees, boosted.learning_rate, x.values, p, out);
  }
  return out;
}

std::vector<double> FittedModel::predict_proba(const FeatureMatrix& x) const {
  std::vector<double> out = predict_margin(x);
  if (std::holds_alternative<ForestState>(state_)) {
    for (double& v : out) v = std::clamp(v, 0.0, 1.0);
  } else {
    for (double& v : out) v = kernels::sigmoid(v);
  }
  return out;
}

FittedModel fit(const LearnerSpec& spec, const FeatureMatrix& train, const FeatureMatrix& validation) {
  switch (spec.kind) {
    case LearnerKind::LogRegL1:
      return fit_logreg(train, Penalty::L1, LogRegParams::from(spec.hyperparams), spec.seed);
    case LearnerKind::LogRegL2:
      return fit_logreg(train, Penalty::L2, LogRegParams::from(spec.hyperparams), spec.seed);
    case LearnerKind::RandomForest:
      return fit_random_forest(train, ForestParams::from(spec.hyperparams), spec.seed);
    case LearnerKind::Gbdt:
      return fit_gbdt(train, validation, GbdtParams::from(spec.hyperparams), spec.seed);
  }
  throw PreconditionError("unknown learner kind");
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

json tree_to_json(const Tree& t) {
  json nodes = json::array();
  for (const auto& n : t.nodes) {
    if (n.is_leaf()) {
      nodes.push_back({{"v", n.value}});
    } else if (n.categorical) {
      nodes.push_back({{"f", n.feature}, {"c", n.left_categories}, {"l", n.left}, {"r", n.right}, {"v", n.value}});
    } else {
      nodes.push_back({{"f", n.feature}, {"t", n.threshold}, {"l", n.left}, {"r", n.right}, {"v", n.value}});
    }
  }
  return nodes;
}

Tree tree_from_json(const json& j, std::size_t columns) {
  Tree t;
  for (const auto& jn : j) {
    TreeNode n;
    n.value = jn.at("v").get<double>();
    if (jn.contains("f")) {
      n.feature = jn.at("f").get<std::int32_t>();
      n.left = jn.at("l").get<std::int32_t>();
      n.right = jn.at("r").get<std::int32_t>();
      if (jn.contains("c")) {
        n.categorical = true;
        n.left_categories = jn.at("c").get<std::vector<std::int32_t>>();
      } else {
        n.threshold = jn.at("t").get<double>();
      }
    }
    t.nodes.push_back(std::move(n));
  }
  const auto count = static_cast<std::int32_t>(t.nodes.size());
  for (const auto& n : t.nodes) {
    if (n.is_leaf()) continue;
    if (n.feature >= static_cast<std::int32_t>(columns) || n.left <= 0 || n.right <= 0 ||
        n.left >= count || n.right >= count) {
      throw ParseError("model file: tree node references out of range");
    }
  }
  if (t.nodes.empty()) throw ParseError("model file: empty tree");
  return t;
}

json optional_json(const auto& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::string save_model(const FittedModel& model) {
  json j;
  j["format"] = kModelFormat;
  j["kind"] = learner_kind_name(model.kind());
  json hp = json::object();
  for (const auto& [k, v] : model.hyperparams()) hp[k] = v;
  j["hyperparams"] = hp;
  j["seed"] = model.seed();
  j["columns"] = model.columns();

  json state;
  if (const auto* lin = std::get_if<LinearState>(&model.state())) {
    state = {{"center", lin->center}, {"scale", lin->scale}, {"coef", lin->coef}, {"intercept", lin->intercept}};
  } else if (const auto* forest = std::get_if<ForestState>(&model.state())) {
    json trees = json::array();
    for (const auto& t : forest->trees) trees.push_back(tree_to_json(t));
    state = {{"trees", trees}};
  } else {
    const auto& b = std::get<BoostedState>(model.state());
    json trees = json::array();
    for (const auto& t : b.trees) trees.push_back(tree_to_json(t));
    state = {{"base_score", b.base_score}, {"learning_rate", b.learning_rate}, {"trees", trees}};
  }
  j["state"] = state;

  const auto& m = model.metadata();
  j["metadata"] = {
      {"iterations", m.iterations},
      {"converged", m.converged},
      {"best_iteration", optional_json(m.best_iteration)},
      {"best_validation_auroc", optional_json(m.best_validation_auroc)},
      {"stopping_iteration", optional_json(m.stopping_iteration)},
      {"objective_trace", m.objective_trace},
      {"validation_trace", m.validation_trace},
  };
  return j.dump();
}

FittedModel load_model(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("model file: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kModelFormat) {
      throw ParseError("model file: unsupported format tag '" + j.at("format").get<std::string>() + "'");
    }
    const LearnerKind kind = parse_learner_kind(j.at("kind").get<std::string>());
    Hyperparams hp;
    for (const auto& [k, v] : j.at("hyperparams").items()) hp[k] = v.get<double>();
    auto columns = j.at("columns").get<std::vector<std::string>>();
    const auto& js = j.at("state");

    FittedModel::State state;
    if (kind == LearnerKind::LogRegL1 || kind == LearnerKind::LogRegL2) {
      LinearState lin{js.at("center").get<std::vector<double>>(), js.at("scale").get<std::vector<double>>(),
                      js.at("coef").get<std::vector<double>>(), js.at("intercept").get<double>()};
      if (lin.center.size() != columns.size() || lin.scale.size() != columns.size() ||
          lin.coef.size() != columns.size()) {
        throw ParseError("model file: coefficient count does not match columns");
      }
      state = std::move(lin);
    } else if (kind == LearnerKind::RandomForest) {
      ForestState f;
      for (const auto& jt : js.at("trees")) f.trees.push_back(tree_from_json(jt, columns.size()));
      state = std::move(f);
    } else {
      BoostedState b;
      b.base_score = js.at("base_score").get<double>();
      b.learning_rate = js.at("learning_rate").get<double>();
      for (const auto& jt : js.at("trees")) b.trees.push_back(tree_from_json(jt, columns.size()));
      state = std::move(b);
    }

    const auto& jm = j.at("metadata");
    TrainingMetadata meta;
    meta.iterations = jm.at("iterations").get<std::size_t>();
    meta.converged = jm.at("converged").get<bool>();
    if (!jm.at("best_iteration").is_null()) meta.best_iteration = jm.at("best_iteration").get<std::size_t>();
    if (!jm.at("best_validation_auroc").is_null()) {
      meta.best_validation_auroc = jm.at("best_validation_auroc").get<double>();
    }
    if (!jm.at("stopping_iteration").is_null()) {
      meta.stopping_iteration = jm.at("stopping_iteration").get<std::size_t>();
    }
    meta.objective_trace = jm.at("objective_trace").get<std::vector<double>>();
    meta.validation_trace = jm.at("validation_trace").get<std::vector<double>>();

    return FittedModel(kind, std::move(hp), j.at("seed").get<std::uint64_t>(), std::move(columns),
                       std::move(state), std::move(meta));
  } catch (const json::exception& e) {
    throw ParseError(std::string("model file: ") + e.what());
  }
}

void save_model_file(const FittedModel& model, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write model file " + path.string());
  os << save_model(model) << '\n';
}

FittedModel load_model_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open model file " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return load_model(ss.str());
}

}  // namespace mdb
