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

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "mdb/core.hpp"
#include "mdb/feature_matrix.hpp"
#include "mdb/random.hpp"

namespace mdbtest {

// Wins plus half ties over every positive-negative pair.
inline double pairwise_auroc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  double wins = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!labels[i]) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j]) continue;
      pairs += 1.0;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

inline mdb::FeatureMatrix numeric_matrix(const std::vector<std::vector<double>>& rows,
                                         const std::vector<std::uint8_t>& labels) {
  mdb::FeatureMatrix m;
  const std::size_t p = rows.empty() ? 0 : rows[0].size();
  for (std::size_t j = 0; j < p; ++j) {
    const std::string name = "x" + std::to_string(j);
    m.columns.push_back({name, mdb::FeatureKind::Numeric, name, {}});
  }
  for (const auto& r : rows) m.values.insert(m.values.end(), r.begin(), r.end());
  m.labels = labels;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    m.keys.push_back({"R" + std::to_string(i), mdb::Period(1, 2023), mdb::Period(1, 2023)});
  }
  return m;
}

// n rows of p uniform features; P(y = 1) = sigmoid(weight * (x0 - 0.5) * 6 + bias).
inline mdb::FeatureMatrix planted_matrix(std::size_t n, std::size_t p, std::uint64_t seed, double weight = 1.0,
                                         double bias = 0.0) {
  mdb::Rng rng(seed);
  std::vector<std::vector<double>> rows(n, std::vector<double>(p));
  std::vector<std::uint8_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : rows[i]) v = mdb::uniform_unit(rng);
    const double z = weight * (rows[i][0] - 0.5) * 6.0 + bias;
    labels[i] = mdb::uniform_unit(rng) < 1.0 / (1.0 + std::exp(-z)) ? 1 : 0;
  }
  labels[0] = 1;
  labels[1] = 0;
  return numeric_matrix(rows, labels);
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("mdb_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  os << text;
}

}  // namespace mdbtest
