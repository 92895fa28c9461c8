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

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "mdb/experiment.hpp"
#include "mdb/feature_matrix.hpp"
#include "mdb/model.hpp"
#include "mdb/synthgen.hpp"

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c, bool config_required) {
  auto* opt = cmd->add_option("-c,--config", c.config, "experiment config (JSON)");
  if (config_required) opt->required()->check(CLI::ExistingFile);
  cmd->add_option("-s,--seed", c.seed, "override the global seed");
  cmd->add_option("-o,--out", c.out, "output directory");
}

// Config problems surface as failures of the config stage.
mdb::ExperimentConfig load_config(const Common& c) {
  try {
    mdb::ExperimentConfig cfg = mdb::ExperimentConfig::load(c.config);
    if (c.seed) cfg.override_seed(*c.seed);
    if (!c.out.empty()) cfg.output_dir = c.out;
    return cfg;
  } catch (const mdb::StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw mdb::StageError("config", c.config + ": " + e.what(), "");
  }
}

int cmd_generate(const Common& c, const std::string& n_loans, const std::string& start, const std::string& end,
                 const std::optional<double>& rate) {
  mdb::GenSpec spec;
  std::string out = c.out;
  if (!c.config.empty()) {
    const auto cfg = load_config(c);
    if (!cfg.synthetic) throw mdb::PreconditionError("config has no synthetic data section");
    spec = *cfg.synthetic;
    if (out.empty()) out = (cfg.output_dir / "data").string();
  }
  if (!n_loans.empty()) spec.n_loans = std::stoul(n_loans);
  if (!start.empty()) spec.start = mdb::parse_period(start);
  if (!end.empty()) spec.end = mdb::parse_period(end);
  if (rate) spec.base_default_rate = *rate;
  // With a config the seed override already reached the synthetic section.
  if (c.seed && c.config.empty()) spec.seed = *c.seed;
  if (out.empty()) out = "synthetic";
  mdb::GenManifest m;
  mdb::GeneratedFiles files;
  try {
    files = mdb::generate_to_directory(spec, out, &m);
  } catch (const std::exception& e) {
    throw mdb::StageError("data", e.what(), "");
  }
  std::cout << m.to_text(spec);
  std::cout << "data=" << files.data.string() << "\nschema=" << files.schema.string()
            << "\nzip3=" << files.zip3.string() << '\n';
  return 0;
}

int cmd_audit(const Common& c) {
  const auto cfg = load_config(c);
  const mdb::PreparedData data = mdb::prepare(cfg);
  std::cout << "# declared policy\n" << data.audit.to_text();
  std::vector<mdb::ColumnProfile> profiles;
  const auto filtered = mdb::apply_cardinality_and_missing_filters(data.partition.train, data.policy, &profiles);
  const auto final_audit = mdb::audit_schema(filtered.source_columns(), filtered);
  std::cout << "# after training-split filters\n" << final_audit.to_text();
  std::cout << "# training-split profiles\ncolumn\tmissing_rate\tdistinct\n";
  for (const auto& p : profiles) std::cout << p.name << '\t' << p.missing_rate() << '\t' << p.distinct << '\n';
  if (!data.rejections.empty()) std::cout << "# rejections\n" << data.rejections.to_text();
  return 0;
}

int cmd_split(const Common& c) {
  const auto cfg = load_config(c);
  const mdb::PreparedData data = mdb::prepare(cfg);
  std::cout << mdb::summarize(data).to_text();
  return 0;
}

int cmd_run(const Common& c) {
  const auto cfg = load_config(c);
  const mdb::ExperimentReport report = mdb::run(cfg);
  for (const auto m : {mdb::Metric::Train, mdb::Metric::Validation, mdb::Metric::ValidationFull, mdb::Metric::Test}) {
    std::cout << "## " << mdb::metric_name(m) << " AUROC\n\n" << mdb::render_table(report, m).markdown << '\n';
  }
  if (report.importance) {
    std::cout << "## permutation importance (" << *report.importance_model << ", 1:" << cfg.designated_ratio
              << ")\n";
    const auto ranked = report.importance->ranked();
    for (std::size_t i = 0; i < ranked.size() && i < 10; ++i) {
      std::cout << ranked[i].rank << ". " << ranked[i].feature << " " << ranked[i].mean_drop << '\n';
    }
  }
  std::cout << "outputs in " << cfg.output_dir.string() << '\n';
  return 0;
}

int cmd_importance(const std::string& model_file, const std::string& matrix_file, std::size_t repeats,
                   const Common& c) {
  const mdb::FittedModel model = mdb::load_model_file(model_file);
  std::ifstream is(matrix_file);
  if (!is) throw mdb::Error("cannot read feature matrix " + matrix_file);
  const mdb::FeatureMatrix x = mdb::read_feature_matrix(is);
  const auto report = mdb::permutation_importance(model, x, repeats, c.seed.value_or(0));
  if (!c.out.empty()) {
    std::filesystem::create_directories(c.out);
    mdb::write_importance(std::filesystem::path(c.out) / "importance.tsv", report);
  }
  std::cout << "baseline_auroc\t" << report.baseline_auroc << '\n';
  std::cout << "feature\tmean_drop\tsd\trank\n";
  for (const auto& e : report.ranked()) {
    std::cout << e.feature << '\t' << e.mean_drop << '\t' << e.sd << '\t' << e.rank << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Leakage-aware mortgage default benchmarking"};
  app.require_subcommand(1);

  Common gen_c, audit_c, split_c, run_c, imp_c;
  std::string n_loans, start, end;
  std::optional<double> rate;
  auto* gen = app.add_subcommand("generate", "write a synthetic loan-performance dataset");
  add_common(gen, gen_c, false);
  gen->add_option("--n-loans", n_loans, "number of loans");
  gen->add_option("--start", start, "first origination month (MMYYYY)");
  gen->add_option("--end", end, "last reporting month (MMYYYY)");
  gen->add_option("--rate", rate, "base default rate");

  auto* audit = app.add_subcommand("audit", "schema and leakage audit");
  add_common(audit, audit_c, true);
  auto* split = app.add_subcommand("split", "temporal partition and split counts");
  add_common(split, split_c, true);
  auto* runc = app.add_subcommand("run", "full model x ratio grid");
  add_common(runc, run_c, true);

  std::string model_file, matrix_file;
  std::size_t repeats = 5;
  auto* imp = app.add_subcommand("importance", "permutation importance of a saved model");
  add_common(imp, imp_c, false);
  imp->add_option("--model", model_file, "saved model (JSON)")->required()->check(CLI::ExistingFile);
  imp->add_option("--matrix", matrix_file, "encoded feature matrix")->required()->check(CLI::ExistingFile);
  imp->add_option("--repeats", repeats, "shuffles per feature group");

  CLI11_PARSE(app, argc, argv);

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    if (*gen) return cmd_generate(gen_c, n_loans, start, end, rate);
    if (*audit) return cmd_audit(audit_c);
    if (*split) return cmd_split(split_c);
    if (*runc) return cmd_run(run_c);
    if (*imp) return cmd_importance(model_file, matrix_file, repeats, imp_c);
  } catch (const mdb::StageError& e) {
    std::cerr << "mdbench " << name << ": stage '" << e.stage() << "' failed: " << e.detail() << '\n';
    if (!e.config_echo().empty()) std::cerr << "config:\n" << e.config_echo() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "mdbench " << name << ": stage 'setup' failed: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
