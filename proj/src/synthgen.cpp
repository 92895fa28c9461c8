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

#include "mdb/synthgen.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

#include "mdb/random.hpp"
#include "mdb/text.hpp"
#include "mdb/zip3.hpp"

namespace mdb {

namespace {

enum class Col : int { Keep, Identifier, Date, Payment };

struct LayoutEntry {
  const char* name;
  const char* kind;  // numeric / categorical / zip3
  Col action;
};

constexpr std::array<LayoutEntry, 49> kLayout{{
    {"LOAN_ID", "categorical", Col::Identifier},
    {"ACT_PERIOD", "categorical", Col::Date},
    {"CHANNEL", "categorical", Col::Keep},
    {"SELLER_NAME", "categorical", Col::Keep},
    {"SERVICER_NAME", "categorical", Col::Keep},
    {"ORIG_RATE", "numeric", Col::Keep},
    {"CURR_RATE", "numeric", Col::Keep},
    {"ORIG_UPB", "numeric", Col::Keep},
    {"ISSUANCE_UPB", "numeric", Col::Keep},
    {"CURRENT_UPB", "numeric", Col::Keep},
    {"ORIG_TERM", "numeric", Col::Keep},
    {"ORIG_DATE", "categorical", Col::Date},
    {"FIRST_PAY", "categorical", Col::Date},
    {"LOAN_AGE", "numeric", Col::Keep},
    {"REM_MONTHS", "numeric", Col::Keep},
    {"ADJ_REM_MONTHS", "numeric", Col::Keep},
    {"MATURITY_DATE", "categorical", Col::Date},
    {"OLTV", "numeric", Col::Keep},
    {"OCLTV", "numeric", Col::Keep},
    {"NUM_BO", "numeric", Col::Keep},
    {"DTI", "numeric", Col::Keep},
    {"CSCORE_B", "numeric", Col::Keep},
    {"CSCORE_C", "numeric", Col::Keep},
    {"FIRST_FLAG", "categorical", Col::Keep},
    {"PURPOSE", "categorical", Col::Keep},
    {"PROP", "categorical", Col::Keep},
    {"NO_UNITS", "numeric", Col::Keep},
    {"OCC_STAT", "categorical", Col::Keep},
    {"STATE", "categorical", Col::Keep},
    {"ZIP", "zip3", Col::Keep},
    {"MI_PCT", "numeric", Col::Keep},
    {"PRODUCT", "categorical", Col::Keep},
    {"PPMT_FLG", "categorical", Col::Keep},
    {"IO", "categorical", Col::Keep},
    {"DLQ_STATUS", "numeric", Col::Payment},
    {"PMT_HISTORY", "categorical", Col::Payment},
    {"MI_TYPE", "categorical", Col::Keep},
    {"SERVICING_FEE", "numeric", Col::Keep},
    {"CURR_SCHD_PRNCPL", "numeric", Col::Keep},
    {"TOT_SCHD_PRNCPL", "numeric", Col::Keep},
    {"UNSCHD_PRNCPL_CURR", "numeric", Col::Keep},
    {"RELOCATION_MORTGAGE_IND", "categorical", Col::Keep},
    {"PROPERTY_VALUE", "numeric", Col::Keep},
    {"HIGH_BALANCE_LOAN_IND", "categorical", Col::Keep},
    {"ARM_INIT_FIX_PERIOD", "numeric", Col::Keep},
    {"MARGIN", "numeric", Col::Keep},
    {"LIFE_CAP", "numeric", Col::Keep},
    {"PERIODIC_CAP", "numeric", Col::Keep},
    {"HOMEREADY_PROGRAM_IND", "categorical", Col::Keep},
}};

struct ZipRegion {
  const char* prefix;
  const char* state;
};

// The last three prefixes are deliberately absent from the built-in table.
constexpr std::array<ZipRegion, 44> kRegions{{
    {"021", "MA"}, {"100", "NY"}, {"152", "PA"}, {"191", "PA"}, {"200", "DC"}, {"282", "NC"},
    {"303", "GA"}, {"327", "FL"}, {"331", "FL"}, {"336", "FL"}, {"372", "TN"}, {"402", "KY"},
    {"432", "OH"}, {"462", "IN"}, {"482", "MI"}, {"532", "WI"}, {"551", "MN"}, {"606", "IL"},
    {"631", "MO"}, {"641", "MO"}, {"681", "NE"}, {"701", "LA"}, {"731", "OK"}, {"750", "TX"},
    {"770", "TX"}, {"787", "TX"}, {"802", "CO"}, {"841", "UT"}, {"850", "AZ"}, {"871", "NM"},
    {"891", "NV"}, {"900", "CA"}, {"902", "CA"}, {"921", "CA"}, {"941", "CA"}, {"945", "CA"},
    {"958", "CA"}, {"967", "HI"}, {"972", "OR"}, {"981", "WA"}, {"995", "AK"}, {"005", "NY"},
    {"399", "GA"}, {"999", "AK"},
}};

constexpr std::size_t kSellers = 2000;
constexpr std::size_t kServicers = 40;
constexpr double kUpbCenter = 300000.0;
constexpr double kAgePeak = 3.0;

double normal(Rng& rng) {
  // Box-Muller on the portable uniform draw.
  const double u1 = 1.0 - uniform_unit(rng);
  const double u2 = uniform_unit(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

bool chance(Rng& rng, double p) { return uniform_unit(rng) < p; }

template <typename T, std::size_t N>
const T& pick(Rng& rng, const std::array<T, N>& items, const std::array<double, N>& weights) {
  double u = uniform_unit(rng);
  for (std::size_t i = 0; i < N; ++i) {
    if (u < weights[i]) return items[i];
    u -= weights[i];
  }
  return items[N - 1];
}

double clamp(double v, double lo, double hi) { return v < lo ? lo : (v > hi ? hi : v); }

struct Loan {
  std::string id;
  Period orig{1, 2000};
  int term = 360;
  double rate = 0.0;
  double upb = 0.0;
  double issuance_upb = 0.0;
  std::optional<double> cscore_b;
  std::optional<double> cscore_c;
  double oltv = 0.0;
  std::optional<double> ocltv;
  std::optional<double> dti;
  int num_bo = 1;
  int units = 1;
  std::optional<double> mi_pct;
  std::optional<std::string> mi_type;
  double servicing_fee = 0.25;
  double curtailment = 0.0;
  bool arm = false;
  int arm_fix = 0;
  double margin = 0.0, life_cap = 0.0, periodic_cap = 0.0;
  std::string channel, seller, servicer, first_flag, purpose, prop, occ, state, relocation,
      high_balance, homeready, ppmt;
  std::optional<std::string> zip;
};

Loan draw_loan(std::size_t index, const GenSpec& spec, Rng& rng) {
  Loan l;
  char buf[32];
  std::snprintf(buf, sizeof buf, "L%09zu", index + 1);
  l.id = buf;
  const int span = months_between(spec.start, spec.end) + 1;
  l.orig = add_months(spec.start, static_cast<int>(uniform_index(rng, static_cast<std::size_t>(span))));
  l.term = pick(rng, std::array<int, 3>{360, 180, 240}, std::array<double, 3>{0.85, 0.10, 0.05});
  l.rate = std::round(clamp(6.5 + 0.6 * normal(rng), 2.5, 9.5) * 1000.0) / 1000.0;
  l.upb = std::round(clamp(std::exp(std::log(kUpbCenter) + 0.45 * normal(rng)), 30000.0, 1500000.0) / 1000.0) *
          1000.0;
  l.issuance_upb = std::round(l.upb * (1.0 - 0.002 * uniform_unit(rng)) * 100.0) / 100.0;
  if (!chance(rng, 0.01)) l.cscore_b = std::round(clamp(745.0 + 45.0 * normal(rng), 300.0, 850.0));
  if (!chance(rng, 0.45)) l.cscore_c = std::round(clamp(750.0 + 45.0 * normal(rng), 300.0, 850.0));
  l.num_bo = l.cscore_c ? 2 : 1;
  l.oltv = std::round(clamp(75.0 + 15.0 * normal(rng), 20.0, 97.0));
  if (!chance(rng, 0.03)) l.ocltv = l.oltv + (chance(rng, 0.1) ? std::round(5.0 * uniform_unit(rng)) : 0.0);
  if (!chance(rng, 0.02)) l.dti = std::round(clamp(36.0 + 8.0 * normal(rng), 5.0, 50.0));
  l.units = chance(rng, 0.97) ? 1 : 2 + static_cast<int>(uniform_index(rng, 3));
  if (!chance(rng, 0.6)) {
    l.mi_pct = std::round(6.0 + 29.0 * uniform_unit(rng));
    l.mi_type = std::to_string(1 + uniform_index(rng, 3));
  }
  l.servicing_fee = std::round((0.25 + 0.125 * uniform_unit(rng)) * 1000.0) / 1000.0;
  l.curtailment = chance(rng, 0.2) ? 0.002 * uniform_unit(rng) : 0.0;
  l.arm = chance(rng, 0.05);
  if (l.arm) {
    l.arm_fix = pick(rng, std::array<int, 3>{60, 84, 120}, std::array<double, 3>{0.5, 0.3, 0.2});
    l.margin = 2.75;
    l.life_cap = 5.0;
    l.periodic_cap = 2.0;
  }
  l.channel = pick(rng, std::array<std::string, 3>{"R", "C", "B"}, std::array<double, 3>{0.55, 0.35, 0.10});
  std::snprintf(buf, sizeof buf, "SELLER %04zu", uniform_index(rng, kSellers));
  l.seller = buf;
  std::snprintf(buf, sizeof buf, "SERVICER %02zu", uniform_index(rng, kServicers));
  l.servicer = buf;
  l.first_flag = chance(rng, 0.45) ? "Y" : "N";
  l.purpose = pick(rng, std::array<std::string, 3>{"P", "R", "C"}, std::array<double, 3>{0.65, 0.15, 0.20});
  l.prop = pick(rng, std::array<std::string, 5>{"SF", "PU", "CO", "MH", "CP"},
                std::array<double, 5>{0.62, 0.28, 0.08, 0.015, 0.005});
  l.occ = pick(rng, std::array<std::string, 3>{"P", "S", "I"}, std::array<double, 3>{0.89, 0.04, 0.07});
  const auto& region = kRegions[uniform_index(rng, kRegions.size())];
  l.state = region.state;
  if (!chance(rng, 0.01)) l.zip = std::string(region.prefix) + "XX";
  l.relocation = chance(rng, 0.002) ? "Y" : "N";
  l.high_balance = l.upb > 766550.0 ? "Y" : "N";
  l.homeready = pick(rng, std::array<std::string, 3>{"7", "F", "H"}, std::array<double, 3>{0.9, 0.07, 0.03});
  l.ppmt = "N";
  return l;
}

struct Dynamic {
  int age = 0;
  double current_upb = 0.0;
  double scheduled = 0.0;
  double unscheduled = 0.0;
  int adj_rem = 0;
};

double amortized_balance(double principal, double annual_rate, int term, int paid) {
  const double r = annual_rate / 1200.0;
  if (paid <= 0) return principal;
  if (paid >= term) return 0.0;
  const double g = std::pow(1.0 + r, term);
  return principal * (g - std::pow(1.0 + r, paid)) / (g - 1.0);
}

Dynamic dynamic_state(const Loan& l, int age) {
  Dynamic d;
  d.age = age;
  const double keep = std::max(0.0, 1.0 - l.curtailment * age);
  const double bal = amortized_balance(l.upb, l.rate, l.term, age) * keep;
  const double prev = amortized_balance(l.upb, l.rate, l.term, age - 1) * std::max(0.0, 1.0 - l.curtailment * (age - 1));
  d.current_upb = std::round(bal * 100.0) / 100.0;
  // Principal scheduled for the coming payment.
  const double sched = amortized_balance(l.upb, l.rate, l.term, age) - amortized_balance(l.upb, l.rate, l.term, age + 1);
  d.scheduled = std::round(sched * 100.0) / 100.0;
  d.unscheduled = age == 0 ? 0.0 : std::round(std::max(0.0, prev - bal - sched) * 100.0) / 100.0;
  d.adj_rem = l.term - age - static_cast<int>(std::floor(l.curtailment * age * 60.0));
  return d;
}

double term_value(std::string_view feature, const Loan& l, const Dynamic& d) {
  if (feature == "LOAN_AGE") {
    const double u = d.age / kAgePeak;
    return 2.0 * u * std::exp(1.0 - u) - 1.0;
  }
  if (feature == "CSCORE_B") {
    if (!l.cscore_b) return 0.0;
    const double z = clamp(-(*l.cscore_b - 745.0) / 45.0, -3.0, 3.0);
    return 0.3 * z + (*l.cscore_b < 690.0 ? 1.5 : 0.0);
  }
  if (feature == "CURRENT_UPB") {
    return d.current_upb > 0.0 ? std::abs(std::log(d.current_upb) - std::log(kUpbCenter)) / 0.45 - 0.8 : 0.0;
  }
  if (feature == "ORIG_UPB") return (std::log(l.upb) - std::log(kUpbCenter)) / 0.45;
  throw PreconditionError("synthetic generator has no signal term for '" + std::string(feature) + "'");
}

double sigmoid(double z) { return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z)); }

std::string num(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string opt_num(const std::optional<double>& v, int decimals) { return v ? num(*v, decimals) : std::string(); }

void write_row(std::ostream& out, char delim, const Loan& l, const Dynamic& d, Period act, int dlq) {
  const int rem = l.term - d.age;
  std::string pmt_history;
  if (dlq > 0) pmt_history = (dlq < 10 ? "0" : "") + std::to_string(dlq);
  else pmt_history = "00";
  const std::string cols[] = {
      l.id,
      format_period(act),
      l.channel,
      l.seller,
      l.servicer,
      num(l.rate, 3),
      num(l.rate, 3),
      num(l.upb, 2),
      num(l.issuance_upb, 2),
      num(d.current_upb, 2),
      std::to_string(l.term),
      format_period(l.orig),
      format_period(add_months(l.orig, 1)),
      std::to_string(d.age),
      std::to_string(rem),
      std::to_string(d.adj_rem),
      format_period(add_months(l.orig, l.term)),
      num(l.oltv, 0),
      opt_num(l.ocltv, 0),
      std::to_string(l.num_bo),
      opt_num(l.dti, 0),
      opt_num(l.cscore_b, 0),
      opt_num(l.cscore_c, 0),
      l.first_flag,
      l.purpose,
      l.prop,
      std::to_string(l.units),
      l.occ,
      l.state,
      l.zip.value_or(""),
      opt_num(l.mi_pct, 0),
      l.arm ? "ARM" : "FRM",
      l.ppmt,
      "N",
      std::to_string(dlq),
      pmt_history,
      l.mi_type.value_or(""),
      num(l.servicing_fee, 3),
      num(d.scheduled, 2),
      num(d.scheduled, 2),
      num(d.unscheduled, 2),
      l.relocation,
      num(std::round(l.upb / (l.oltv / 100.0)), 0),
      l.high_balance,
      std::to_string(l.arm_fix),
      num(l.margin, 3),
      num(l.life_cap, 3),
      num(l.periodic_cap, 3),
      l.homeready,
  };
  static_assert(std::size(cols) == kLayout.size());
  for (std::size_t i = 0; i < std::size(cols); ++i) {
    if (i) out << delim;
    out << cols[i];
  }
  out << '\n';
}

}  // namespace

void GenSpec::validate() const {
  if (n_loans == 0) throw PreconditionError("generator needs at least one loan");
  if (end < start) {
    throw PreconditionError("generator span is empty: end " + format_period(end) + " precedes start " +
                            format_period(start));
  }
  if (!(base_default_rate > 0.0 && base_default_rate < 1.0)) {
    throw PreconditionError("base default rate must lie in (0, 1)");
  }
  const Loan probe;
  const Dynamic d;
  for (const auto& [name, coef] : signal) {
    if (!std::isfinite(coef)) throw PreconditionError("signal coefficient for " + name + " is not finite");
    (void)term_value(name, probe, d);
  }
}

std::string GenManifest::to_text(const GenSpec& spec) const {
  std::ostringstream os;
  os << "format=mdb-synth-manifest/1\n";
  os << "seed=" << seed << '\n';
  os << "n_loans=" << n_loans << '\n';
  os << "n_rows=" << n_rows << '\n';
  os << "start=" << format_period(spec.start) << '\n';
  os << "end=" << format_period(spec.end) << '\n';
  os << "base_default_rate=" << text::format_double(spec.base_default_rate) << '\n';
  os << "intercept=" << text::format_double(intercept) << '\n';
  for (const auto& [name, c] : coefficients) os << "coef." << name << '=' << text::format_double(c) << '\n';
  os << "expected_positive_rate=" << text::format_double(expected_positive_rate) << '\n';
  os << "empirical_positive_rate=" << text::format_double(empirical_positive_rate) << '\n';
  os << "positives=" << positives << '\n';
  os << "dominant_feature=" << dominant_feature << '\n';
  return os.str();
}

SchemaPolicy synthetic_schema() {
  SchemaPolicy p;
  for (std::size_t i = 0; i < kLayout.size(); ++i) {
    const auto& e = kLayout[i];
    const std::string kind = e.kind;
    p.layout.push_back({e.name, i, kind == "numeric" ? SourceKind::Numeric : SourceKind::Categorical});
    switch (e.action) {
      case Col::Keep:
        if (kind == "numeric") {
          p.keep_numeric.emplace_back(e.name);
        } else {
          p.keep_categorical.emplace_back(e.name);
          if (kind == "zip3") p.zip_column = e.name;
        }
        break;
      case Col::Identifier: p.drop_reasons[e.name] = DropReason::Identifier; break;
      case Col::Date: p.drop_reasons[e.name] = DropReason::Date; break;
      case Col::Payment: p.drop_reasons[e.name] = DropReason::PaymentHistory; break;
    }
  }
  return p;
}

GenManifest generate(const GenSpec& spec, std::ostream& out, char delimiter) {
  spec.validate();
  Rng loan_rng(derive_seed(spec.seed, {0}));
  std::vector<Loan> loans;
  loans.reserve(spec.n_loans);
  for (std::size_t i = 0; i < spec.n_loans; ++i) loans.push_back(draw_loan(i, spec, loan_rng));

  // Signal score per row, in emission order.
  std::vector<double> score;
  std::map<std::string, double> term_sum, term_sq;
  for (const auto& l : loans) {
    const int ages = months_between(l.orig, spec.end);
    for (int a = 0; a <= ages; ++a) {
      const Dynamic d = dynamic_state(l, a);
      double s = 0.0;
      for (const auto& [name, coef] : spec.signal) {
        const double t = coef * term_value(name, l, d);
        s += t;
        term_sum[name] += t;
        term_sq[name] += t * t;
      }
      score.push_back(s);
    }
  }

  const auto mean_p = [&](double b) {
    double sum = 0.0;
    for (const double s : score) sum += sigmoid(b + s);
    return sum / static_cast<double>(score.size());
  };
  double lo = -60.0, hi = 60.0;
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mean_p(mid) < spec.base_default_rate ? lo : hi) = mid;
  }

  GenManifest m;
  m.seed = spec.seed;
  m.n_loans = spec.n_loans;
  m.n_rows = score.size();
  m.intercept = 0.5 * (lo + hi);
  m.coefficients = spec.signal;
  m.expected_positive_rate = mean_p(m.intercept);
  double best_sd = -1.0;
  for (const auto& [name, sum] : term_sum) {
    const double n = static_cast<double>(m.n_rows);
    const double var = std::max(0.0, term_sq[name] / n - (sum / n) * (sum / n));
    if (var > best_sd) {
      best_sd = var;
      m.dominant_feature = name;
    }
  }

  Rng label_rng(derive_seed(spec.seed, {1}));
  std::size_t row = 0;
  for (const auto& l : loans) {
    const int ages = months_between(l.orig, spec.end);
    for (int a = 0; a <= ages; ++a, ++row) {
      const Dynamic d = dynamic_state(l, a);
      int dlq = 0;
      if (uniform_unit(label_rng) < sigmoid(m.intercept + score[row])) {
        dlq = 1;
        while (dlq < 6 && chance(label_rng, 0.35)) ++dlq;
        ++m.positives;
      }
      write_row(out, delimiter, l, d, add_months(l.orig, a), dlq);
    }
  }
  m.empirical_positive_rate = static_cast<double>(m.positives) / static_cast<double>(m.n_rows);
  if (!out) throw Error("failed writing generated rows");
  return m;
}

GeneratedFiles generate_to_directory(const GenSpec& spec, const std::filesystem::path& dir, GenManifest* manifest,
                                     char delimiter) {
  std::filesystem::create_directories(dir);
  GeneratedFiles files{dir / "loans.dat", dir / "schema.txt", dir / "manifest.txt", dir / "zip3.tsv"};
  std::ofstream data(files.data);
  if (!data) throw Error("cannot write " + files.data.string());
  const GenManifest m = generate(spec, data, delimiter);
  data.close();
  {
    std::ofstream os(files.schema);
    if (!os) throw Error("cannot write " + files.schema.string());
    os << format_schema_sidecar(synthetic_schema(), delimiter);
  }
  {
    std::ofstream os(files.manifest);
    if (!os) throw Error("cannot write " + files.manifest.string());
    os << m.to_text(spec);
  }
  Zip3Table::builtin().save(files.zip3, delimiter);
  if (manifest) *manifest = m;
  return files;
}

}  // namespace mdb
