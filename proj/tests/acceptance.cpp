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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mdb/encoder.hpp"
#include "mdb/eval.hpp"
#include "mdb/experiment.hpp"
#include "mdb/gbdt.hpp"
#include "mdb/ingest.hpp"
#include "mdb/logreg.hpp"
#include "mdb/partition.hpp"
#include "mdb/random.hpp"
#include "mdb/sampler.hpp"
#include "mdb/synthgen.hpp"
#include "support.hpp"

using namespace mdb;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("criterion %2d: %s  %s (%s)\n", id, o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ------------------------------------------------------------------ 1

Outcome partition_oracle() {
  const Cutoffs c{};
  const auto t0 = Clock::now();
  std::size_t cells = 0, mismatches = 0;
  for (int o = Period(1, 2021).ordinal(); o <= Period(12, 2025).ordinal(); ++o) {
    for (int a = o; a <= Period(12, 2025).ordinal(); ++a) {
      const Period po = Period::from_ordinal(o), pa = Period::from_ordinal(a);
      const bool tr = po < c.validation_start && pa < c.validation_start;
      const bool va = c.validation_start <= po && po < c.test_start && c.validation_start <= pa && pa < c.test_start;
      const bool te = po >= c.test_start && pa >= c.test_start;
      const Split want = tr ? Split::Train : va ? Split::Validation : te ? Split::Test : Split::Discard;
      mismatches += assign(po, pa, c) != want;
      ++cells;
    }
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 1.0,
          std::to_string(cells) + " cells, " + std::to_string(mismatches) + " mismatches, " + fmt("%.4f s", secs)};
}

// ------------------------------------------------------------------ 2

Outcome auroc_oracle() {
  Rng rng(20260101);
  double worst_rank = 0, worst_area = 0;
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 2 + uniform_index(rng, 199);
    const std::size_t levels = 1 + uniform_index(rng, 12);
    std::vector<double> s(n);
    std::vector<std::uint8_t> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(uniform_index(rng, levels)) / 4.0;
      y[i] = uniform_index(rng, 2);
    }
    y[0] = 1;
    y[1] = 0;
    const double a = auroc(s, y);
    worst_rank = std::max(worst_rank, std::abs(a - mdbtest::pairwise_auroc(s, y)));
    worst_area = std::max(worst_area, std::abs(trapezoid_area(roc_curve(s, y)) - a));
  }
  return {worst_rank <= 1e-12 && worst_area <= 1e-12,
          "max |rank - pairwise| " + fmt("%.2e", worst_rank) + ", max |trapezoid - rank| " + fmt("%.2e", worst_area)};
}

// ------------------------------------------------------------------ 3

double rel_error(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num) / std::max(std::sqrt(den), 1e-12);
}

Outcome gradient_checks() {
  Rng rng(33);
  const std::size_t n = 150, p = 6;
  std::vector<double> z(n * p);
  std::vector<std::uint8_t> y(n);
  for (auto& v : z) v = uniform_unit(rng) * 4 - 2;
  for (auto& v : y) v = uniform_index(rng, 2);
  double worst_lr = 0, worst_gb = 0;
  const double h = 1e-5;
  for (int point = 0; point < 10; ++point) {
    std::vector<double> w(p);
    for (auto& v : w) v = uniform_unit(rng) * 2 - 1;
    const double b = uniform_unit(rng) - 0.5;
    for (const Penalty pen : {Penalty::L1, Penalty::L2}) {
      const double C = 0.5;
      std::vector<double> g(p);
      const double gb = logreg_smooth_gradient(z, p, y, w, b, pen, C, g);
      const auto smooth = [&](const std::vector<double>& ww, double bb) {
        double f = logreg_objective(z, p, y, ww, bb, pen, C);
        if (pen == Penalty::L1) {
          for (const double v : ww) f -= std::abs(v) / C;
        }
        return f;
      };
      std::vector<double> analytic = g, numeric(p + 1);
      analytic.push_back(gb);
      for (std::size_t j = 0; j < p; ++j) {
        auto wp = w, wm = w;
        wp[j] += h;
        wm[j] -= h;
        numeric[j] = (smooth(wp, b) - smooth(wm, b)) / (2 * h);
      }
      numeric[p] = (smooth(w, b + h) - smooth(w, b - h)) / (2 * h);
      worst_lr = std::max(worst_lr, rel_error(analytic, numeric));
    }
    const double m = uniform_unit(rng) * 10 - 5;
    for (const std::uint8_t lab : {0, 1}) {
      const auto gh = logistic_grad_hess(m, lab);
      const double g = (logistic_loss(m + h, lab) - logistic_loss(m - h, lab)) / (2 * h);
      const double hh = (logistic_grad_hess(m + h, lab).grad - logistic_grad_hess(m - h, lab).grad) / (2 * h);
      worst_gb = std::max({worst_gb, std::abs(gh.grad - g) / std::abs(g), std::abs(gh.hess - hh) / std::abs(hh)});
    }
  }
  return {worst_lr < 1e-5 && worst_gb < 1e-5,
          "logreg max rel err " + fmt("%.2e", worst_lr) + ", gbdt grad/hess max rel err " + fmt("%.2e", worst_gb)};
}

// ------------------------------------------------------------------ shared synthetic data

struct SyntheticSplits {
  std::vector<std::uint8_t> train, validation, test;
  Dataset all;
};

SyntheticSplits synthetic_splits(std::size_t n_loans, std::uint64_t seed) {
  GenSpec s;
  s.n_loans = n_loans;
  s.seed = seed;
  std::ostringstream os;
  generate(s, os);
  std::istringstream is(os.str());
  SyntheticSplits out;
  out.all = ingest(is, synthetic_schema()).data;
  const Partition p = partition_dataset(out.all, Cutoffs{});
  for (const auto& r : p.train.rows) out.train.push_back(r.dlq_status > 0);
  for (const auto& r : p.validation.rows) out.validation.push_back(r.dlq_status > 0);
  for (const auto& r : p.test.rows) out.test.push_back(r.dlq_status > 0);
  return out;
}

// ------------------------------------------------------------------ 4

Outcome downsampling() {
  const SyntheticSplits s = synthetic_splits(3000, 11);
  // Every validation positive with three negatives each, so ratios 5 and 10
  // exhaust the negative pool.
  std::vector<std::uint8_t> tight;
  std::size_t val_pos = 0;
  for (const auto v : s.validation) val_pos += v;
  std::size_t neg_budget = 3 * val_pos;
  for (const auto v : s.validation) {
    if (v) {
      tight.push_back(1);
    } else if (neg_budget > 0) {
      tight.push_back(0);
      --neg_budget;
    }
  }
  const auto pos_of = [](std::span<const std::uint8_t> y) {
    std::size_t p = 0;
    for (const auto v : y) p += v;
    return p;
  };
  RatioConfig cfg;
  cfg.seed = 5;
  const RatioGrid a = build_ratio_grid(s.train, tight, s.test, cfg);
  const RatioGrid b = build_ratio_grid(s.train, tight, s.test, cfg);
  bool ok = a.test_rows == s.test.size();
  std::size_t checks = 0, exhausted = 0;
  for (const auto& [split, labels] : {std::pair{0, std::span<const std::uint8_t>(s.train)},
                                      std::pair{1, std::span<const std::uint8_t>(tight)}}) {
    const std::size_t pos = pos_of(labels), neg = labels.size() - pos;
    std::set<std::size_t> first_positives;
    for (const int x : cfg.ratios) {
      const SampleResult& r = split == 0 ? a.draws.at(x).train : a.draws.at(x).validation;
      const SampleResult& r2 = split == 0 ? b.draws.at(x).train : b.draws.at(x).validation;
      ok &= r.negatives == std::min<std::size_t>(static_cast<std::size_t>(x) * pos, neg);
      ok &= r.positives == pos;
      ok &= r.indices == r2.indices;
      std::set<std::size_t> positives;
      std::size_t neg_seen = 0;
      for (const auto i : r.indices) {
        if (labels[i]) {
          positives.insert(i);
        } else {
          ++neg_seen;
        }
      }
      ok &= neg_seen == r.negatives;
      if (first_positives.empty()) first_positives = positives;
      ok &= positives == first_positives && positives.size() == pos;
      exhausted += r.pool_exhausted;
      ++checks;
    }
  }
  return {ok && exhausted > 0, std::to_string(checks) + " split x ratio draws checked, " + std::to_string(exhausted) +
                                   " with an exhausted negative pool"};
}

// ------------------------------------------------------------------ 5, 6, 10

ExperimentConfig default_synthetic_config(const fs::path& out, std::uint64_t seed) {
  ExperimentConfig c;
  c.synthetic = GenSpec{};
  c.override_seed(seed);
  c.output_dir = out;
  return c;
}

struct MainRun {
  ExperimentReport report;
  ExperimentConfig config;
  double seconds = 0;
};

Outcome signal_recovery(const MainRun& run) {
  const auto& r = run.report;
  double gbdt_min = 1, logreg_min = 1, logreg_max = 0;
  std::ostringstream cells;
  for (std::size_t m = 0; m < r.models.size(); ++m) {
    const LearnerKind kind = run.config.learners[m].kind;
    for (std::size_t k = 0; k < r.ratios.size(); ++k) {
      const double v = r.value(m, k, Metric::Test);
      if (kind == LearnerKind::Gbdt) gbdt_min = std::min(gbdt_min, v);
      if (kind == LearnerKind::LogRegL1 || kind == LearnerKind::LogRegL2) {
        logreg_min = std::min(logreg_min, v);
        logreg_max = std::max(logreg_max, v);
      }
    }
  }
  const bool ok = gbdt_min > 0.80 && logreg_min > 0.70 && gbdt_min >= logreg_max && run.seconds < 300;
  return {ok, std::to_string(r.split.train.rows + r.split.validation.rows + r.split.test.rows) + " kept rows; min GBDT test " +
                  format_auroc(gbdt_min) + ", logreg test " + format_auroc(logreg_min) + ".." +
                  format_auroc(logreg_max) + "; " + fmt("%.1f s", run.seconds)};
}

Outcome ratio_stability(const MainRun& run) {
  const auto& r = run.report;
  bool ok = true;
  std::ostringstream os;
  for (std::size_t m = 0; m < r.models.size(); ++m) {
    double lo = 1, hi = 0;
    for (std::size_t k = 0; k < r.ratios.size(); ++k) {
      lo = std::min(lo, r.value(m, k, Metric::Test));
      hi = std::max(hi, r.value(m, k, Metric::Test));
    }
    ok &= hi - lo < 0.03;
    os << (m ? ", " : "") << r.models[m] << " " << fmt("%.4f", hi - lo);
  }
  return {ok, "test AUROC range per model: " + os.str()};
}

Outcome determinism(const MainRun& first) {
  ExperimentConfig again = first.config;
  again.output_dir = first.config.output_dir.string() + "_again";
  fs::remove_all(again.output_dir);
  run(again);
  std::size_t compared = 0, differing = 0;
  for (const auto& rel : first.report.outputs) {
    const std::string s = rel.generic_string();
    const bool wanted = s.rfind("tables/", 0) == 0 || s.rfind("roc/", 0) == 0 || s.rfind("importance_", 0) == 0;
    if (!wanted) continue;
    ++compared;
    differing += mdbtest::read_file(first.config.output_dir / rel) != mdbtest::read_file(again.output_dir / rel);
  }
  fs::remove_all(again.output_dir);
  return {compared > 0 && differing == 0,
          std::to_string(compared) + " table, ROC and importance files compared, " + std::to_string(differing) +
              " differ"};
}

// ------------------------------------------------------------------ 7

Outcome importance_recovery(const fs::path& scratch) {
  std::size_t raw_hits = 0, onehot_hits = 0;
  std::ostringstream firsts;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    for (const Pathway pw : {Pathway::RawCategorical, Pathway::OneHot}) {
      ExperimentConfig c = default_synthetic_config(scratch / ("imp_" + std::to_string(seed)), seed);
      c.ratios = {2};
      c.learners = {{pw == Pathway::RawCategorical ? "gbdt_raw" : "gbdt_onehot", LearnerKind::Gbdt, {}, pw}};
      c.save_models = false;
      const ExperimentReport r = run(c);
      const std::string top = r.importance->ranked().at(0).feature;
      const bool hit = top == "LOAN_AGE";
      (pw == Pathway::RawCategorical ? raw_hits : onehot_hits) += hit;
      if (!hit) firsts << " seed " << seed << " " << pathway_name(pw) << " top=" << top << ";";
      fs::remove_all(c.output_dir);
    }
  }
  return {raw_hits >= 9 && onehot_hits >= 9,
          "LOAN_AGE ranked first in " + std::to_string(raw_hits) + "/10 raw-pathway and " +
              std::to_string(onehot_hits) + "/10 one-hot GBDT runs" + firsts.str()};
}

// ------------------------------------------------------------------ 8

Outcome early_stopping() {
  const FeatureMatrix train = mdbtest::planted_matrix(600, 4, 81, 1.5);
  const FeatureMatrix val = mdbtest::planted_matrix(300, 4, 82, 1.5);
  std::ostringstream os;
  bool ok = true;
  for (const std::size_t k : {1u, 7u, 33u, 120u}) {
    GbdtParams p;
    p.num_iterations = 200;
    // Trajectory rising to k, then falling.
    const ValidationMetric metric = [k](std::size_t it, std::span<const double>, std::span<const std::uint8_t>) {
      return 0.9 - 0.001 * std::abs(static_cast<double>(it) - static_cast<double>(k));
    };
    const FittedModel m = fit_gbdt(train, val, p, 0, metric);
    const auto& trees = std::get<BoostedState>(m.state()).trees;
    const bool this_ok = m.metadata().best_iteration == k && trees.size() == k &&
                         m.metadata().stopping_iteration == k + static_cast<std::size_t>(p.early_stopping_patience);
    ok &= this_ok;
    os << (os.tellp() ? ", " : "") << "peak " << k << " -> best " << *m.metadata().best_iteration << ", "
       << trees.size() << " trees";
  }
  return {ok, os.str()};
}

// ------------------------------------------------------------------ 9

Outcome leakage_guard() {
  const SyntheticSplits s = synthetic_splits(3000, 19);
  const Partition p = partition_dataset(s.all, Cutoffs{});
  const std::string train_only = FittedEncoder::fit(p.train, synthetic_schema(), Zip3Table::builtin()).serialize();
  Dataset appended = p.train;
  for (const Dataset* d : {&p.validation, &p.test}) {
    appended.rows.insert(appended.rows.end(), d->rows.begin(), d->rows.end());
  }
  const std::string guarded =
      fit_encoder_on_train(appended, Cutoffs{}, synthetic_schema(), Zip3Table::builtin()).serialize();
  const std::string from_all = fit_encoder_on_train(s.all, Cutoffs{}, synthetic_schema(), Zip3Table::builtin()).serialize();
  // Sanity: an unguarded fit on every row would differ.
  const std::string unguarded = FittedEncoder::fit(appended, synthetic_schema(), Zip3Table::builtin()).serialize();
  const bool ok = guarded == train_only && from_all == train_only && unguarded != train_only;
  return {ok, std::string("serialized encoder ") + (guarded == train_only ? "identical" : "differs") + " with " +
                  std::to_string(p.validation.rows.size() + p.test.rows.size()) +
                  " validation/test rows appended; unguarded fit " + (unguarded != train_only ? "differs" : "identical")};
}

}  // namespace

int main() {
  const fs::path scratch = fs::temp_directory_path() / ("mdb_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(scratch);
  fs::create_directories(scratch);

  report(1, "partition oracle equivalence", partition_oracle);
  report(2, "AUROC oracle equivalence", auroc_oracle);
  report(3, "gradient checks", gradient_checks);
  report(4, "downsampling arithmetic", downsampling);

  MainRun main_run;
  std::string main_error;
  try {
    main_run.config = default_synthetic_config(scratch / "main", 42);
    const auto t0 = Clock::now();
    main_run.report = run(main_run.config);
    main_run.seconds = seconds_since(t0);
  } catch (const std::exception& e) {
    main_error = e.what();
  }
  const auto needs_main = [&](Outcome (*f)(const MainRun&)) {
    return [&, f] { return main_error.empty() ? f(main_run) : Outcome{false, "run failed: " + main_error}; };
  };
  report(5, "synthetic signal recovery", needs_main(signal_recovery));
  report(6, "ratio stability", needs_main(ratio_stability));
  report(7, "importance recovery", [&] { return importance_recovery(scratch); });
  report(8, "early stopping", early_stopping);
  report(9, "leakage guard", leakage_guard);
  report(10, "end-to-end determinism", needs_main(determinism));

  fs::remove_all(scratch);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
