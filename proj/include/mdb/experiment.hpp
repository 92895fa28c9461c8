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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mdb/core.hpp"
#include "mdb/encoder.hpp"
#include "mdb/eval.hpp"
#include "mdb/ingest.hpp"
#include "mdb/model.hpp"
#include "mdb/partition.hpp"
#include "mdb/sampler.hpp"
#include "mdb/schema.hpp"
#include "mdb/synthgen.hpp"

namespace mdb {

// An error raised inside a named stage of a run. `config_echo` is the
// canonical JSON of the configuration that was running.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& detail, std::string config_echo);
  const std::string& stage() const { return stage_; }
  const std::string& detail() const { return detail_; }
  const std::string& config_echo() const { return config_echo_; }

 private:
  std::string stage_;
  std::string detail_;
  std::string config_echo_;
};

struct LearnerEntry {
  std::string name;
  LearnerKind kind = LearnerKind::Gbdt;
  Hyperparams overrides;
  Pathway pathway = Pathway::OneHot;
};

// JSON configuration. Relative paths resolve against the config file's
// directory. Example:
//   {
//     "data": {"synthetic": {"n_loans": 4000, "start": "012023", "end": "122024"}},
//     "cutoffs": {"validation_start": "112023", "test_start": "062024"},
//     "ratios": [1, 2, 5, 10],
//     "seed": 42,
//     "learners": [{"name": "gbdt", "kind": "gbdt", "pathway": "raw"}],
//     "output_dir": "out"
//   }
// A file source is {"file": "loans.dat", "schema": "schema.txt"}.
struct ExperimentConfig {
  std::optional<std::filesystem::path> data_file;
  std::optional<std::filesystem::path> schema_file;
  std::optional<GenSpec> synthetic;
  std::optional<std::filesystem::path> zip3_file;  // built-in table when absent
  char delimiter = '|';
  Cutoffs cutoffs;
  PartitionMode partition_mode = PartitionMode::RowLevel;
  std::vector<int> ratios{1, 2, 5, 10};
  std::vector<LearnerEntry> learners = default_learners();
  std::filesystem::path output_dir = "mdb_out";
  std::uint64_t seed = 42;
  // Cell whose ROC curves and importance report are emitted.
  int designated_ratio = 2;
  std::size_t importance_repeats = 5;
  bool save_models = true;

  // logreg_l1, logreg_l2, random_forest on one-hot features, and the boosted
  // trees on both pathways.
  static std::vector<LearnerEntry> default_learners();

  static ExperimentConfig from_json(std::string_view text, const std::filesystem::path& base_dir = {});
  static ExperimentConfig load(const std::filesystem::path& path);
  std::string to_json() const;

  // Replaces the global seed; a synthetic source follows it.
  void override_seed(std::uint64_t seed);

  // Throws PreconditionError unless exactly one data source is set, referenced
  // paths exist, learner names are unique and at least one learner and ratio
  // are given.
  void validate() const;
};

// Ingested, audited and partitioned data: everything before any statistic is
// fitted.
struct PreparedData {
  SchemaPolicy policy;
  AuditReport audit;
  RejectionReport rejections;
  Partition partition;
  Zip3Table zip3;
};

struct SplitCounts {
  std::size_t rows = 0;
  std::size_t positives = 0;
};

struct SplitSummary {
  SplitCounts train, validation, test;
  std::size_t discarded = 0;
  std::size_t strict_discards = 0;
  std::size_t rejected = 0;
  std::string to_text() const;
};

SplitSummary summarize(const PreparedData& data);

struct CellResult {
  std::string model;
  int ratio = 0;
  double train_auroc = 0.0;
  // On the downsampled validation rows (the ones early stopping saw).
  double validation_auroc = 0.0;
  // On every validation row.
  double validation_full_auroc = 0.0;
  // On every test row.
  double test_auroc = 0.0;
  std::size_t train_rows = 0;
  std::size_t validation_rows = 0;
  std::size_t iterations = 0;
  std::optional<std::size_t> best_iteration;
  std::optional<std::size_t> stopping_iteration;
  std::optional<std::filesystem::path> roc_file;
};

enum class Metric { Train, Validation, ValidationFull, Test };
std::string_view metric_name(Metric m);

struct ExperimentReport {
  std::vector<std::string> models;
  std::vector<int> ratios;
  // Model-major: cells[m * ratios.size() + r].
  std::vector<CellResult> cells;
  std::size_t test_rows = 0;
  std::size_t test_positives = 0;
  std::optional<std::string> importance_model;
  std::optional<std::filesystem::path> importance_file;
  std::optional<ImportanceReport> importance;
  SplitSummary split;
  // Every file written by the run, relative to the output directory.
  std::vector<std::filesystem::path> outputs;

  const CellResult& cell(std::size_t model, std::size_t ratio) const;
  double value(std::size_t model, std::size_t ratio, Metric m) const;
};

// Stage order: config, data, ingest, audit, partition, encode, sample, fit,
// evaluate, importance, report. Writes every output under
// config.output_dir. On failure writes run_manifest.txt with the failed stage
// and the files written so far, then throws StageError.
ExperimentReport run(const ExperimentConfig& config);

// Runs config, data, ingest, audit and partition only.
PreparedData prepare(const ExperimentConfig& config);

// "%.4f" of an AUROC; ties round half to even.
std::string format_auroc(double v);

// Rows with the maximum value of column `ratio`; all tied maxima.
std::vector<std::size_t> column_best(const ExperimentReport& report, std::size_t ratio, Metric m);

struct RenderedTable {
  std::string delimited;  // tab-separated, best cells suffixed with '*'
  std::string markdown;   // best cells in bold
};

// One row per model, one column per ratio ("1:x").
RenderedTable render_table(const ExperimentReport& report, Metric m);

}  // namespace mdb
