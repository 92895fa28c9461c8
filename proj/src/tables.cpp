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

#include <cstdio>
#include <sstream>

#include "mdb/experiment.hpp"

namespace mdb {

std::string_view metric_name(Metric m) {
  switch (m) {
    case Metric::Train: return "train";
    case Metric::Validation: return "validation";
    case Metric::ValidationFull: return "validation_full";
    case Metric::Test: return "test";
  }
  return "?";
}

const CellResult& ExperimentReport::cell(std::size_t model, std::size_t ratio) const {
  if (model >= models.size() || ratio >= ratios.size()) throw PreconditionError("report cell out of range");
  return cells.at(model * ratios.size() + ratio);
}

double ExperimentReport::value(std::size_t model, std::size_t ratio, Metric m) const {
  const CellResult& c = cell(model, ratio);
  switch (m) {
    case Metric::Train: return c.train_auroc;
    case Metric::Validation: return c.validation_auroc;
    case Metric::ValidationFull: return c.validation_full_auroc;
    case Metric::Test: return c.test_auroc;
  }
  return 0.0;
}

std::string format_auroc(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::vector<std::size_t> column_best(const ExperimentReport& report, std::size_t ratio, Metric m) {
  std::vector<std::size_t> best;
  double top = 0.0;
  for (std::size_t i = 0; i < report.models.size(); ++i) {
    const double v = report.value(i, ratio, m);
    if (best.empty() || v > top) {
      best.assign(1, i);
      top = v;
    } else if (v == top) {
      best.push_back(i);
    }
  }
  return best;
}

RenderedTable render_table(const ExperimentReport& report, Metric m) {
  const std::size_t nm = report.models.size(), nr = report.ratios.size();
  std::vector<std::vector<bool>> marked(nm, std::vector<bool>(nr, false));
  for (std::size_t r = 0; r < nr; ++r) {
    for (const std::size_t i : column_best(report, r, m)) marked[i][r] = true;
  }

  std::ostringstream tsv, md;
  tsv << "model";
  md << "| model |";
  for (const int x : report.ratios) {
    tsv << "\t1:" << x;
    md << " 1:" << x << " |";
  }
  tsv << '\n';
  md << "\n|---|";
  for (std::size_t r = 0; r < nr; ++r) md << "---:|";
  md << '\n';
  for (std::size_t i = 0; i < nm; ++i) {
    tsv << report.models[i];
    md << "| " << report.models[i] << " |";
    for (std::size_t r = 0; r < nr; ++r) {
      const std::string v = format_auroc(report.value(i, r, m));
      tsv << '\t' << v << (marked[i][r] ? "*" : "");
      md << ' ' << (marked[i][r] ? "**" + v + "**" : v) << " |";
    }
    tsv << '\n';
    md << '\n';
  }
  return {tsv.str(), md.str()};
}

}  // namespace mdb
