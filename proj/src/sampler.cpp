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

#include "mdb/sampler.hpp"

#include <fstream>
#include <sstream>

#include "mdb/core.hpp"
#include "mdb/random.hpp"

namespace mdb {

void RatioConfig::validate() const {
  if (ratios.empty()) throw PreconditionError("ratio list is empty");
  for (const int x : ratios) {
    if (x < 1) throw PreconditionError("ratio must be >= 1, got " + std::to_string(x));
  }
}

SampleResult downsample(std::span<const std::uint8_t> labels, int ratio, std::uint64_t seed) {
  if (ratio < 1) throw PreconditionError("ratio must be >= 1, got " + std::to_string(ratio));
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] ? pos : neg).push_back(i);
  if (pos.empty()) throw PreconditionError("cannot downsample a split with zero positives");

  const std::size_t want = static_cast<std::size_t>(ratio) * pos.size();
  const std::size_t take = std::min(want, neg.size());

  Rng rng(seed);
  // Partial Fisher-Yates: the first `take` slots become a uniform draw
  // without replacement.
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j = i + uniform_index(rng, neg.size() - i);
    std::swap(neg[i], neg[j]);
  }

  SampleResult out;
  out.positives = pos.size();
  out.negatives = take;
  out.indices = std::move(pos);
  out.indices.insert(out.indices.end(), neg.begin(), neg.begin() + static_cast<std::ptrdiff_t>(take));
  shuffle_in_place(std::span<std::size_t>(out.indices), rng);
  out.achieved_ratio = static_cast<double>(take) / static_cast<double>(out.positives);
  if (take < want) {
    out.pool_exhausted = true;
    std::ostringstream os;
    os << "negative pool exhausted: wanted " << want << " negatives, kept all " << take
       << " (achieved 1:" << out.achieved_ratio << " instead of 1:" << ratio << ")";
    out.warning = os.str();
  }
  return out;
}

RatioGrid build_ratio_grid(std::span<const std::uint8_t> train_labels,
                           std::span<const std::uint8_t> validation_labels,
                           std::span<const std::uint8_t> test_labels, const RatioConfig& config) {
  config.validate();
  RatioGrid grid;
  grid.test_rows = test_labels.size();
  for (const int x : config.ratios) {
    const auto ux = static_cast<std::uint64_t>(x);
    RatioDraw draw;
    draw.train = downsample(train_labels, x, derive_seed(config.seed, {ux, 0}));
    draw.validation = downsample(validation_labels, x, derive_seed(config.seed, {ux, 1}));
    grid.draws.emplace(x, std::move(draw));
  }
  return grid;
}

void write_sample_manifest(const std::filesystem::path& path, const FeatureMatrix& source,
                           const SampleResult& sample, char d) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write sample manifest " + path.string());
  os << "LOAN_ID" << d << "ORIG_DATE" << d << "ACT_PERIOD" << d << "label\n";
  for (const std::size_t i : sample.indices) {
    const RowKey& k = source.keys.at(i);
    os << k.loan_id << d << format_period(k.orig_date) << d << format_period(k.act_period) << d
       << int(source.labels[i]) << '\n';
  }
}

}  // namespace mdb
