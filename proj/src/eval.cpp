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

#include "mdb/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "mdb/random.hpp"
#include "mdb/text.hpp"

namespace mdb {

namespace {

struct ClassCounts {
  std::size_t pos = 0;
  std::size_t neg = 0;
};

ClassCounts validate(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) {
    throw PreconditionError("auroc: scores and labels differ in length");
  }
  ClassCounts c;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) throw PreconditionError("auroc: non-finite score at " + std::to_string(i));
    (labels[i] ? c.pos : c.neg) += 1;
  }
  if (c.pos == 0 || c.neg == 0) throw PreconditionError("auroc: labels contain a single class");
  return c;
}

std::vector<std::size_t> order_by_score(std::span<const double> scores, bool descending) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return descending ? scores[a] > scores[b] : scores[a] < scores[b];
  });
  return idx;
}

}  // namespace

double auroc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  const ClassCounts c = validate(scores, labels);
  const auto idx = order_by_score(scores, false);
  // Sum of average ranks (1-based) over positives; ranks are half-integers,
  // exact in double for any realistic n.
  double rank_sum = 0.0;
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    std::size_t pos_in_group = 0;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) {
      pos_in_group += labels[idx[j]];
      ++j;
    }
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    rank_sum += avg_rank * static_cast<double>(pos_in_group);
    i = j;
  }
  const double p = static_cast<double>(c.pos), n = static_cast<double>(c.neg);
  const double u = rank_sum - p * (p + 1.0) / 2.0;
  return u / (p * n);
}

RocCurve roc_curve(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  const ClassCounts c = validate(scores, labels);
  const auto idx = order_by_score(scores, true);
  RocCurve curve;
  curve.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  std::size_t tp = 0, fp = 0, i = 0;
  while (i < idx.size()) {
    const double s = scores[idx[i]];
    while (i < idx.size() && scores[idx[i]] == s) {
      (labels[idx[i]] ? tp : fp) += 1;
      ++i;
    }
    curve.push_back({s, static_cast<double>(fp) / static_cast<double>(c.neg),
                     static_cast<double>(tp) / static_cast<double>(c.pos)});
  }
  return curve;
}

double trapezoid_area(const RocCurve& curve) {
  double area = 0.0;
  for (std::size_t k = 1; k < curve.size(); ++k) {
    area += (curve[k].fpr - curve[k - 1].fpr) * (curve[k].tpr + curve[k - 1].tpr) * 0.5;
  }
  return area;
}

void write_roc_curve(const std::filesystem::path& path, const RocCurve& curve, char d) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write ROC file " + path.string());
  os << "threshold" << d << "fpr" << d << "tpr\n";
  for (const auto& pt : curve) {
    os << text::format_double(pt.threshold) << d << text::format_double(pt.fpr) << d
       << text::format_double(pt.tpr) << '\n';
  }
}

std::vector<ImportanceEntry> ImportanceReport::ranked() const {
  std::vector<ImportanceEntry> out = entries;
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.rank < b.rank; });
  return out;
}

const ImportanceEntry* ImportanceReport::find(std::string_view feature) const {
  for (const auto& e : entries) {
    if (e.feature == feature) return &e;
  }
  return nullptr;
}

ImportanceReport permutation_importance(const FittedModel& model, const FeatureMatrix& x,
                                        std::size_t repeats, std::uint64_t seed) {
  if (repeats == 0) throw PreconditionError("permutation importance needs repeats >= 1");
  ImportanceReport report;
  report.repeats = repeats;
  report.baseline_auroc = auroc(model.predict_proba(x), x.labels);

  const auto groups = x.groups();
  const std::size_t tasks = groups.size() * repeats;
  std::vector<double> drops(tasks, 0.0);
  const std::size_t n = x.rows(), p = x.cols();
  const auto ntasks = static_cast<std::ptrdiff_t>(tasks);

#pragma omp parallel
  {
    FeatureMatrix local = x;
    std::vector<std::size_t> perm(n);
#pragma omp for schedule(dynamic, 1)
    for (std::ptrdiff_t t = 0; t < ntasks; ++t) {
      const std::size_t g = static_cast<std::size_t>(t) / repeats;
      const std::size_t r = static_cast<std::size_t>(t) % repeats;
      Rng rng(derive_seed(seed, {g, r}));
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      shuffle_in_place(std::span<std::size_t>(perm), rng);
      for (const std::size_t j : groups[g].columns) {
        for (std::size_t i = 0; i < n; ++i) local.values[i * p + j] = x.values[perm[i] * p + j];
      }
      drops[static_cast<std::size_t>(t)] = report.baseline_auroc - auroc(model.predict_proba(local), x.labels);
      for (const std::size_t j : groups[g].columns) {
        for (std::size_t i = 0; i < n; ++i) local.values[i * p + j] = x.values[i * p + j];
      }
    }
  }

  for (std::size_t g = 0; g < groups.size(); ++g) {
    ImportanceEntry e;
    e.feature = groups[g].name;
    e.drops.assign(drops.begin() + static_cast<std::ptrdiff_t>(g * repeats),
                   drops.begin() + static_cast<std::ptrdiff_t>((g + 1) * repeats));
    double sum = 0.0;
    for (const double d : e.drops) sum += d;
    e.mean_drop = sum / static_cast<double>(repeats);
    if (repeats > 1) {
      double ss = 0.0;
      for (const double d : e.drops) ss += (d - e.mean_drop) * (d - e.mean_drop);
      e.sd = std::sqrt(ss / static_cast<double>(repeats - 1));
    }
    report.entries.push_back(std::move(e));
  }
  std::vector<std::size_t> order(report.entries.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return report.entries[a].mean_drop > report.entries[b].mean_drop;
  });
  for (std::size_t k = 0; k < order.size(); ++k) report.entries[order[k]].rank = k + 1;
  return report;
}

void write_importance(const std::filesystem::path& path, const ImportanceReport& report, char d) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write importance file " + path.string());
  os << "feature" << d << "mean_drop" << d << "sd" << d << "rank\n";
  for (const auto& e : report.ranked()) {
    os << e.feature << d << text::format_double(e.mean_drop) << d << text::format_double(e.sd) << d
       << e.rank << '\n';
  }
}

}  // namespace mdb
