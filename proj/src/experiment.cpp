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

#include "mdb/experiment.hpp"

#include <exception>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mdb/random.hpp"
#include "mdb/text.hpp"

namespace mdb {

using nlohmann::json;

StageError::StageError(std::string stage, const std::string& detail, std::string config_echo)
    : Error("[" + stage + "] " + detail),
      stage_(std::move(stage)),
      detail_(detail),
      config_echo_(std::move(config_echo)) {}

namespace {

// Seed domains for streams derived from the global seed.
constexpr std::uint64_t kSamplerStream = 1;
constexpr std::uint64_t kLearnerStream = 2;
constexpr std::uint64_t kImportanceStream = 3;
constexpr std::uint64_t kSyntheticStream = 4;

void check_keys(const json& obj, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw PreconditionError(std::string(where) + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const auto a : allowed) ok = ok || key == a;
    if (!ok) throw PreconditionError("unknown key '" + key + "' in " + std::string(where));
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

char parse_delimiter(const json& j) {
  const auto s = j.get<std::string>();
  if (s.size() != 1) throw PreconditionError("delimiter must be a single character");
  return s[0];
}

GenSpec parse_synthetic(const json& j, std::uint64_t fallback_seed, bool* explicit_seed) {
  check_keys(j, "data.synthetic", {"n_loans", "start", "end", "base_default_rate", "signal", "seed"});
  GenSpec g;
  g.seed = derive_seed(fallback_seed, {kSyntheticStream});
  if (j.contains("n_loans")) g.n_loans = j.at("n_loans").get<std::size_t>();
  if (j.contains("start")) g.start = parse_period(j.at("start").get<std::string>());
  if (j.contains("end")) g.end = parse_period(j.at("end").get<std::string>());
  if (j.contains("base_default_rate")) g.base_default_rate = j.at("base_default_rate").get<double>();
  if (j.contains("signal")) {
    g.signal.clear();
    for (const auto& [k, v] : j.at("signal").items()) g.signal[k] = v.get<double>();
  }
  *explicit_seed = j.contains("seed");
  if (*explicit_seed) g.seed = j.at("seed").get<std::uint64_t>();
  return g;
}

std::string ratio_tag(int ratio) { return "1x" + std::to_string(ratio); }

SplitCounts count(const Dataset& d) {
  SplitCounts c;
  c.rows = d.rows.size();
  for (const auto& r : d.rows) c.positives += r.label() == Label::Positive ? 1 : 0;
  return c;
}

// Tracks outputs and stage names so a failure can report both.
class RunContext {
 public:
  RunContext(const ExperimentConfig& config, std::string echo) : config_(config), echo_(std::move(echo)) {}

  template <typename F>
  auto stage(const std::string& name, F&& body) -> decltype(body()) {
    try {
      return body();
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      fail(name, e.what());
    }
  }

  std::filesystem::path path(const std::filesystem::path& rel) {
    const auto full = config_.output_dir / rel;
    std::filesystem::create_directories(full.parent_path());
    outputs_.push_back(rel);
    return full;
  }

  void write_text(const std::filesystem::path& rel, const std::string& content) {
    std::ofstream os(path(rel), std::ios::binary);
    if (!os) throw Error("cannot write " + (config_.output_dir / rel).string());
    os << content;
  }

  const std::vector<std::filesystem::path>& outputs() const { return outputs_; }

  void write_manifest(std::string_view status, std::string_view failed_stage) {
    std::ofstream os(config_.output_dir / "run_manifest.txt", std::ios::binary);
    if (!os) return;
    os << "status=" << status << '\n';
    if (!failed_stage.empty()) os << "failed_stage=" << failed_stage << '\n';
    for (const auto& p : outputs_) os << "output=" << p.generic_string() << '\n';
  }

  [[noreturn]] void fail(const std::string& stage, const std::string& what) {
    std::error_code ec;
    std::filesystem::create_directories(config_.output_dir, ec);
    if (!ec) write_manifest("failed", stage);
    throw StageError(stage, what, echo_);
  }

 private:
  const ExperimentConfig& config_;
  std::string echo_;
  std::vector<std::filesystem::path> outputs_;
};

PreparedData prepare_in(const ExperimentConfig& config, RunContext& ctx) {
  PreparedData out;
  std::filesystem::path data_path;
  ctx.stage("data", [&] {
    if (config.synthetic) {
      const auto files = generate_to_directory(*config.synthetic, config.output_dir / "data", nullptr,
                                               config.delimiter);
      for (const auto& f : {files.data, files.schema, files.manifest, files.zip3}) {
        ctx.path(std::filesystem::relative(f, config.output_dir));
      }
      data_path = files.data;
      out.policy = synthetic_schema();
    } else {
      data_path = *config.data_file;
      out.policy = load_schema_sidecar(*config.schema_file, config.delimiter);
    }
    out.zip3 = config.zip3_file ? Zip3Table::load(*config.zip3_file, config.delimiter) : Zip3Table::builtin();
  });
  ctx.stage("ingest", [&] {
    auto result = ingest_file(data_path, out.policy, config.delimiter);
    out.rejections = std::move(result.report);
    ctx.write_text("rejections.txt", out.rejections.to_text());
    out.partition.train = std::move(result.data);
  });
  ctx.stage("audit", [&] {
    out.audit = audit_schema(out.policy.source_columns(), out.policy);
    ctx.write_text("audit.txt", out.audit.to_text());
  });
  ctx.stage("partition", [&] {
    Dataset all = std::move(out.partition.train);
    out.partition = partition_dataset(all, config.cutoffs, config.partition_mode);
    write_discard_audit(ctx.path("discarded.txt"), out.partition.discarded, config.delimiter);
  });
  return out;
}

struct EncodedSplits {
  FeatureMatrix train, validation, test;
};

}  // namespace

std::vector<LearnerEntry> ExperimentConfig::default_learners() {
  return {
      {"logreg_l1", LearnerKind::LogRegL1, {}, Pathway::OneHot},
      {"logreg_l2", LearnerKind::LogRegL2, {}, Pathway::OneHot},
      {"random_forest", LearnerKind::RandomForest, {}, Pathway::OneHot},
      {"gbdt_onehot", LearnerKind::Gbdt, {}, Pathway::OneHot},
      {"gbdt_raw", LearnerKind::Gbdt, {}, Pathway::RawCategorical},
  };
}

ExperimentConfig ExperimentConfig::from_json(std::string_view text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig c;
  try {
    check_keys(j, "config",
               {"data", "zip3", "delimiter", "cutoffs", "partition_mode", "ratios", "learners", "output_dir",
                "seed", "designated_ratio", "importance_repeats", "save_models"});
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("delimiter")) c.delimiter = parse_delimiter(j.at("delimiter"));
    if (!j.contains("data")) throw PreconditionError("config needs a data section");
    const json& data = j.at("data");
    check_keys(data, "data", {"file", "schema", "synthetic"});
    if (data.contains("file")) c.data_file = resolve(base_dir, data.at("file").get<std::string>());
    if (data.contains("schema")) c.schema_file = resolve(base_dir, data.at("schema").get<std::string>());
    if (data.contains("synthetic")) {
      bool explicit_seed = false;
      c.synthetic = parse_synthetic(data.at("synthetic"), c.seed, &explicit_seed);
    }
    if (j.contains("zip3")) c.zip3_file = resolve(base_dir, j.at("zip3").get<std::string>());
    if (j.contains("cutoffs")) {
      const json& cut = j.at("cutoffs");
      check_keys(cut, "cutoffs", {"validation_start", "test_start"});
      Period v = c.cutoffs.validation_start, t = c.cutoffs.test_start;
      if (cut.contains("validation_start")) v = parse_period(cut.at("validation_start").get<std::string>());
      if (cut.contains("test_start")) t = parse_period(cut.at("test_start").get<std::string>());
      c.cutoffs = Cutoffs::make(v, t);
    }
    if (j.contains("partition_mode")) {
      const auto m = j.at("partition_mode").get<std::string>();
      if (m == "row") c.partition_mode = PartitionMode::RowLevel;
      else if (m == "strict_loan") c.partition_mode = PartitionMode::StrictLoan;
      else throw PreconditionError("partition_mode must be 'row' or 'strict_loan', got '" + m + "'");
    }
    if (j.contains("ratios")) c.ratios = j.at("ratios").get<std::vector<int>>();
    if (j.contains("learners")) {
      c.learners.clear();
      for (const json& l : j.at("learners")) {
        check_keys(l, "learner", {"name", "kind", "pathway", "params"});
        LearnerEntry e;
        e.kind = parse_learner_kind(l.at("kind").get<std::string>());
        e.name = l.value("name", std::string(learner_kind_name(e.kind)));
        if (l.contains("pathway")) e.pathway = parse_pathway(l.at("pathway").get<std::string>());
        if (l.contains("params")) {
          for (const auto& [k, v] : l.at("params").items()) e.overrides[k] = v.get<double>();
        }
        c.learners.push_back(std::move(e));
      }
    }
    if (j.contains("output_dir")) c.output_dir = resolve(base_dir, j.at("output_dir").get<std::string>());
    if (j.contains("designated_ratio")) c.designated_ratio = j.at("designated_ratio").get<int>();
    if (j.contains("importance_repeats")) c.importance_repeats = j.at("importance_repeats").get<std::size_t>();
    if (j.contains("save_models")) c.save_models = j.at("save_models").get<bool>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot read config " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return from_json(ss.str(), path.parent_path());
}

void ExperimentConfig::override_seed(std::uint64_t s) {
  seed = s;
  if (synthetic) synthetic->seed = derive_seed(s, {kSyntheticStream});
}

std::string ExperimentConfig::to_json() const {
  json j;
  json data = json::object();
  if (data_file) data["file"] = data_file->generic_string();
  if (schema_file) data["schema"] = schema_file->generic_string();
  if (synthetic) {
    json s;
    s["n_loans"] = synthetic->n_loans;
    s["start"] = format_period(synthetic->start);
    s["end"] = format_period(synthetic->end);
    s["base_default_rate"] = synthetic->base_default_rate;
    s["signal"] = synthetic->signal;
    s["seed"] = synthetic->seed;
    data["synthetic"] = s;
  }
  j["data"] = data;
  if (zip3_file) j["zip3"] = zip3_file->generic_string();
  j["delimiter"] = std::string(1, delimiter);
  j["cutoffs"] = {{"validation_start", format_period(cutoffs.validation_start)},
                  {"test_start", format_period(cutoffs.test_start)}};
  j["partition_mode"] = partition_mode == PartitionMode::RowLevel ? "row" : "strict_loan";
  j["ratios"] = ratios;
  json ls = json::array();
  for (const auto& l : learners) {
    json e;
    e["name"] = l.name;
    e["kind"] = std::string(learner_kind_name(l.kind));
    e["pathway"] = std::string(pathway_name(l.pathway));
    e["params"] = json::object();
    for (const auto& [k, v] : l.overrides) e["params"][k] = v;
    ls.push_back(e);
  }
  j["learners"] = ls;
  j["output_dir"] = output_dir.generic_string();
  j["seed"] = seed;
  j["designated_ratio"] = designated_ratio;
  j["importance_repeats"] = importance_repeats;
  j["save_models"] = save_models;
  return j.dump(2) + "\n";
}

void ExperimentConfig::validate() const {
  if (static_cast<bool>(data_file) == static_cast<bool>(synthetic)) {
    throw PreconditionError("config needs exactly one data source: a file or a synthetic spec");
  }
  if (data_file) {
    if (!schema_file) throw PreconditionError("a data file needs a schema sidecar");
    if (!std::filesystem::exists(*data_file)) throw PreconditionError("data file not found: " + data_file->string());
    if (!std::filesystem::exists(*schema_file)) {
      throw PreconditionError("schema file not found: " + schema_file->string());
    }
  }
  if (synthetic) synthetic->validate();
  if (zip3_file && !std::filesystem::exists(*zip3_file)) {
    throw PreconditionError("zip3 table not found: " + zip3_file->string());
  }
  RatioConfig{ratios, seed}.validate();
  if (std::set<int>(ratios.begin(), ratios.end()).size() != ratios.size()) {
    throw PreconditionError("ratios must be distinct");
  }
  if (learners.empty()) throw PreconditionError("config needs at least one learner");
  std::set<std::string> names;
  for (const auto& l : learners) {
    if (l.name.empty()) throw PreconditionError("learner name must not be empty");
    if (!names.insert(l.name).second) throw PreconditionError("duplicate learner name '" + l.name + "'");
    (void)LearnerSpec::make(l.name, l.kind, l.overrides, 0, l.pathway);
  }
  if (importance_repeats == 0) throw PreconditionError("importance_repeats must be >= 1");
  if (output_dir.empty()) throw PreconditionError("output_dir must not be empty");
}

std::string SplitSummary::to_text() const {
  std::ostringstream os;
  os << "split\trows\tpositives\n";
  os << "train\t" << train.rows << '\t' << train.positives << '\n';
  os << "validation\t" << validation.rows << '\t' << validation.positives << '\n';
  os << "test\t" << test.rows << '\t' << test.positives << '\n';
  os << "discarded\t" << discarded << "\t-\n";
  os << "strict_discards\t" << strict_discards << "\t-\n";
  os << "rejected\t" << rejected << "\t-\n";
  return os.str();
}

SplitSummary summarize(const PreparedData& data) {
  SplitSummary s;
  s.train = count(data.partition.train);
  s.validation = count(data.partition.validation);
  s.test = count(data.partition.test);
  s.discarded = data.partition.discarded.size();
  s.strict_discards = data.partition.strict_discards;
  s.rejected = data.rejections.rejections.size();
  return s;
}

PreparedData prepare(const ExperimentConfig& config) {
  const std::string echo = config.to_json();
  RunContext ctx(config, echo);
  ctx.stage("config", [&] { config.validate(); });
  auto data = prepare_in(config, ctx);
  ctx.write_text("split.tsv", summarize(data).to_text());
  ctx.write_manifest("ok", "");
  return data;
}

ExperimentReport run(const ExperimentConfig& config) {
  const std::string echo = config.to_json();
  RunContext ctx(config, echo);
  ctx.stage("config", [&] {
    config.validate();
    ctx.write_text("config_echo.json", echo);
  });

  PreparedData data = prepare_in(config, ctx);
  ExperimentReport report;
  report.split = summarize(data);
  report.ratios = config.ratios;
  for (const auto& l : config.learners) report.models.push_back(l.name);

  // Every Train-derived statistic is fixed here, before validation or test
  // rows are encoded.
  std::map<Pathway, EncodedSplits> encoded;
  ctx.stage("encode", [&] {
    const FittedEncoder encoder =
        FittedEncoder::fit(data.partition.train, data.policy, data.zip3);
    ctx.write_text("encoder.json", encoder.serialize());
    for (const auto& l : config.learners) {
      if (encoded.count(l.pathway)) continue;
      EncodedSplits e;
      e.train = encoder.encode(data.partition.train, l.pathway);
      e.validation = encoder.encode(data.partition.validation, l.pathway);
      e.test = encoder.encode(data.partition.test, l.pathway);
      if (config.save_models) {
        // Saved models can be re-scored, e.g. by the importance subcommand.
        std::ostringstream os;
        write_feature_matrix(os, e.validation);
        ctx.write_text("matrices/validation_" + std::string(pathway_name(l.pathway)) + ".txt", os.str());
      }
      encoded.emplace(l.pathway, std::move(e));
    }
  });
  const EncodedSplits& any = encoded.begin()->second;
  report.test_rows = any.test.rows();
  report.test_positives = any.test.positives();

  RatioGrid grid;
  ctx.stage("sample", [&] {
    grid = build_ratio_grid(any.train.labels, any.validation.labels, any.test.labels,
                            RatioConfig{config.ratios, derive_seed(config.seed, {kSamplerStream})});
    for (const auto& [ratio, draw] : grid.draws) {
      write_sample_manifest(ctx.path("samples/train_" + ratio_tag(ratio) + ".txt"), any.train, draw.train,
                            config.delimiter);
      write_sample_manifest(ctx.path("samples/validation_" + ratio_tag(ratio) + ".txt"), any.validation,
                            draw.validation, config.delimiter);
    }
  });

  const std::size_t nm = config.learners.size(), nr = config.ratios.size();
  std::vector<std::optional<FittedModel>> models(nm * nr);
  report.cells.resize(nm * nr);
  ctx.stage("fit", [&] {
    std::vector<std::exception_ptr> errors(nm * nr);
    const auto ncells = static_cast<std::ptrdiff_t>(nm * nr);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t c = 0; c < ncells; ++c) {
      const std::size_t m = static_cast<std::size_t>(c) / nr, r = static_cast<std::size_t>(c) % nr;
      try {
        const LearnerEntry& l = config.learners[m];
        const int ratio = config.ratios[r];
        const RatioDraw& draw = grid.draws.at(ratio);
        const EncodedSplits& e = encoded.at(l.pathway);
        const FeatureMatrix train = e.train.select(draw.train.indices);
        const FeatureMatrix val = e.validation.select(draw.validation.indices);
        const auto spec = LearnerSpec::make(l.name, l.kind, l.overrides,
                                            derive_seed(config.seed, {kLearnerStream, m,
                                                                      static_cast<std::uint64_t>(ratio)}),
                                            l.pathway);
        models[static_cast<std::size_t>(c)] = fit(spec, train, val);
        const FittedModel& model = *models[static_cast<std::size_t>(c)];
        CellResult& cell = report.cells[static_cast<std::size_t>(c)];
        cell.model = l.name;
        cell.ratio = ratio;
        cell.train_rows = train.rows();
        cell.validation_rows = val.rows();
        cell.iterations = model.metadata().iterations;
        cell.best_iteration = model.metadata().best_iteration;
        cell.stopping_iteration = model.metadata().stopping_iteration;
        cell.train_auroc = auroc(model.predict_proba(train), train.labels);
        cell.validation_auroc = auroc(model.predict_proba(val), val.labels);
        cell.validation_full_auroc = auroc(model.predict_proba(e.validation), e.validation.labels);
        cell.test_auroc = auroc(model.predict_proba(e.test), e.test.labels);
      } catch (...) {
        errors[static_cast<std::size_t>(c)] = std::current_exception();
      }
    }
    for (std::size_t c = 0; c < errors.size(); ++c) {
      if (!errors[c]) continue;
      try {
        std::rethrow_exception(errors[c]);
      } catch (const std::exception& e) {
        throw Error(config.learners[c / nr].name + " at 1:" + std::to_string(config.ratios[c % nr]) + ": " +
                    e.what());
      }
    }
    if (config.save_models) {
      for (std::size_t c = 0; c < models.size(); ++c) {
        save_model_file(*models[c], ctx.path("models/" + config.learners[c / nr].name + "_" +
                                             ratio_tag(config.ratios[c % nr]) + ".json"));
      }
    }
  });

  std::optional<std::size_t> designated;
  for (std::size_t r = 0; r < nr; ++r) {
    if (config.ratios[r] == config.designated_ratio) designated = r;
  }

  ctx.stage("evaluate", [&] {
    if (!designated) return;
    for (std::size_t m = 0; m < nm; ++m) {
      const std::size_t c = m * nr + *designated;
      const FeatureMatrix& test = encoded.at(config.learners[m].pathway).test;
      const auto curve = roc_curve(models[c]->predict_proba(test), test.labels);
      const std::filesystem::path rel =
          "roc/roc_" + config.learners[m].name + "_" + ratio_tag(config.designated_ratio) + ".tsv";
      write_roc_curve(ctx.path(rel), curve);
      report.cells[c].roc_file = rel;
    }
  });

  ctx.stage("importance", [&] {
    if (!designated) return;
    std::size_t best = 0;
    for (std::size_t m = 1; m < nm; ++m) {
      if (report.value(m, *designated, Metric::Test) > report.value(best, *designated, Metric::Test)) best = m;
    }
    const std::size_t c = best * nr + *designated;
    const FeatureMatrix& val = encoded.at(config.learners[best].pathway).validation;
    report.importance = permutation_importance(*models[c], val, config.importance_repeats,
                                               derive_seed(config.seed, {kImportanceStream}));
    report.importance_model = config.learners[best].name;
    const std::filesystem::path rel =
        "importance_" + config.learners[best].name + "_" + ratio_tag(config.designated_ratio) + ".tsv";
    write_importance(ctx.path(rel), *report.importance);
    report.importance_file = rel;
  });

  ctx.stage("report", [&] {
    for (const Metric m : {Metric::Train, Metric::Validation, Metric::ValidationFull, Metric::Test}) {
      const RenderedTable t = render_table(report, m);
      const std::string base = "tables/auroc_" + std::string(metric_name(m));
      ctx.write_text(base + ".tsv", t.delimited);
      ctx.write_text(base + ".md", t.markdown);
    }
    std::ostringstream cells;
    cells << "model\tratio\ttrain_rows\tvalidation_rows\titerations\tbest_iteration\tstopping_iteration\t"
             "train\tvalidation\tvalidation_full\ttest\n";
    for (const auto& c : report.cells) {
      cells << c.model << "\t1:" << c.ratio << '\t' << c.train_rows << '\t' << c.validation_rows << '\t'
            << c.iterations << '\t' << (c.best_iteration ? std::to_string(*c.best_iteration) : "-") << '\t'
            << (c.stopping_iteration ? std::to_string(*c.stopping_iteration) : "-") << '\t'
            << text::format_double(c.train_auroc) << '\t' << text::format_double(c.validation_auroc) << '\t'
            << text::format_double(c.validation_full_auroc) << '\t' << text::format_double(c.test_auroc)
            << '\n';
    }
    ctx.write_text("cells.tsv", cells.str());
    ctx.write_text("split.tsv", report.split.to_text());
    report.outputs = ctx.outputs();
    ctx.write_manifest("ok", "");
  });
  return report;
}

}  // namespace mdb
