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

#include "mdb/encoder.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

namespace mdb {

std::string_view pathway_name(Pathway p) {
  return p == Pathway::OneHot ? "onehot" : "raw";
}

Pathway parse_pathway(std::string_view text) {
  if (text == "onehot") return Pathway::OneHot;
  if (text == "raw") return Pathway::RawCategorical;
  throw ParseError("unknown pathway '" + std::string(text) + "' (expected onehot or raw)");
}

double median_of(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

FittedEncoder FittedEncoder::fit(const Dataset& train, const SchemaPolicy& policy, Zip3Table zip3) {
  FittedEncoder enc;
  enc.policy_ = apply_cardinality_and_missing_filters(train, policy);
  enc.zip3_ = std::move(zip3);

  for (const auto& name : enc.policy_.keep_numeric) {
    const std::size_t idx = *train.numeric_index(name);
    std::vector<double> present;
    for (const auto& r : train.rows) {
      if (r.numeric[idx]) present.push_back(*r.numeric[idx]);
    }
    enc.numeric_.push_back({name, median_of(std::move(present))});
  }

  for (const auto& name : enc.policy_.keep_categorical) {
    const std::size_t idx = *train.categorical_index(name);
    if (enc.policy_.zip_column && *enc.policy_.zip_column == name) {
      std::vector<double> lat, lon;
      for (const auto& r : train.rows) {
        if (!r.categorical[idx]) continue;
        if (const auto ll = enc.zip3_.lookup(*r.categorical[idx])) {
          lat.push_back(ll->latitude);
          lon.push_back(ll->longitude);
        }
      }
      enc.zip_ = ZipStat{name, median_of(std::move(lat)), median_of(std::move(lon))};
      continue;
    }
    std::set<std::string> seen;
    for (const auto& r : train.rows) {
      seen.insert(r.categorical[idx] ? *r.categorical[idx] : std::string(kMissingCategory));
    }
    enc.categorical_.push_back({name, {seen.begin(), seen.end()}});
  }
  return enc;
}

FeatureMatrix FittedEncoder::encode(const Dataset& data, Pathway pathway, EncodeReport* report) const {
  EncodeReport local;
  EncodeReport& rep = report ? *report : local;

  FeatureMatrix m;
  // Column layout first; each entry knows how to fill itself.
  struct NumericPlan {
    std::size_t source_index;
    double median;
  };
  struct CategoricalPlan {
    std::size_t source_index;
    const CategoricalStat* stat;
  };
  std::vector<NumericPlan> numeric_plan;
  std::vector<CategoricalPlan> categorical_plan;
  std::optional<std::size_t> zip_index;

  const auto numeric_source = [&](const std::string& name) {
    const auto idx = data.numeric_index(name);
    if (!idx) throw PreconditionError("dataset lacks numeric column '" + name + "'");
    return *idx;
  };
  const auto categorical_source = [&](const std::string& name) {
    const auto idx = data.categorical_index(name);
    if (!idx) throw PreconditionError("dataset lacks categorical column '" + name + "'");
    return *idx;
  };

  for (const auto& s : numeric_) {
    numeric_plan.push_back({numeric_source(s.name), s.median});
    m.columns.push_back({s.name, FeatureKind::Numeric, s.name, {}});
    m.columns.push_back({s.name + "__missing", FeatureKind::MissingFlag, s.name, {}});
  }
  if (zip_) {
    zip_index = categorical_source(zip_->name);
    m.columns.push_back({zip_->name + "__lat", FeatureKind::Numeric, zip_->name, {}});
    m.columns.push_back({zip_->name + "__lon", FeatureKind::Numeric, zip_->name, {}});
    m.columns.push_back({zip_->name + "__missing", FeatureKind::MissingFlag, zip_->name, {}});
  }
  for (const auto& s : categorical_) {
    categorical_plan.push_back({categorical_source(s.name), &s});
    if (pathway == Pathway::OneHot) {
      for (const auto& c : s.categories) {
        m.columns.push_back({s.name + "=" + c, FeatureKind::OneHot, s.name, {}});
      }
    } else {
      m.columns.push_back({s.name, FeatureKind::RawCategorical, s.name, s.categories});
    }
  }

  const std::size_t p = m.columns.size();
  m.values.assign(data.rows.size() * p, 0.0);
  m.labels.reserve(data.rows.size());
  m.keys.reserve(data.rows.size());
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    const LoanRow& r = data.rows[i];
    double* out = m.values.data() + i * p;
    std::size_t j = 0;
    for (const auto& np : numeric_plan) {
      const auto& v = r.numeric[np.source_index];
      out[j++] = v ? *v : np.median;
      out[j++] = v ? 0.0 : 1.0;
      if (!v) ++rep.imputed_numeric;
    }
    if (zip_index) {
      const auto& z = r.categorical[*zip_index];
      const auto ll = z ? zip3_.lookup(*z) : std::nullopt;
      if (z && !ll) ++rep.zip_lookup_misses;
      out[j++] = ll ? ll->latitude : zip_->latitude_median;
      out[j++] = ll ? ll->longitude : zip_->longitude_median;
      out[j++] = ll ? 0.0 : 1.0;
    }
    for (const auto& cp : categorical_plan) {
      const auto& cats = cp.stat->categories;
      const auto& v = r.categorical[cp.source_index];
      const std::string_view value = v ? std::string_view(*v) : kMissingCategory;
      const auto it = std::lower_bound(cats.begin(), cats.end(), value);
      const bool seen = it != cats.end() && *it == value;
      if (!seen) ++rep.unseen_categories;
      const auto code = static_cast<std::size_t>(it - cats.begin());
      if (pathway == Pathway::OneHot) {
        if (seen) out[j + code] = 1.0;
        j += cats.size();
      } else {
        out[j++] = static_cast<double>(seen ? code : cats.size());
      }
    }
    m.labels.push_back(static_cast<std::uint8_t>(r.label()));
    m.keys.push_back(r.key());
  }
  return m;
}

std::string FittedEncoder::serialize() const {
  using nlohmann::json;
  json j;
  j["format"] = "mdb-encoder/1";
  json drops = json::object();
  for (const auto& [name, reason] : policy_.drop_reasons) drops[name] = drop_reason_name(reason);
  j["policy"] = {
      {"keep_numeric", policy_.keep_numeric},
      {"keep_categorical", policy_.keep_categorical},
      {"drop_reasons", drops},
      {"zip_column", policy_.zip_column ? json(*policy_.zip_column) : json(nullptr)},
      {"cardinality_limit", policy_.cardinality_limit},
      {"missing_rate_limit", policy_.missing_rate_limit},
  };
  json numeric = json::array();
  for (const auto& s : numeric_) numeric.push_back({{"name", s.name}, {"median", s.median}});
  j["numeric"] = numeric;
  json categorical = json::array();
  for (const auto& s : categorical_) {
    categorical.push_back({{"name", s.name}, {"categories", s.categories}});
  }
  j["categorical"] = categorical;
  if (zip_) {
    j["zip"] = {{"name", zip_->name},
                {"latitude_median", zip_->latitude_median},
                {"longitude_median", zip_->longitude_median}};
  } else {
    j["zip"] = nullptr;
  }
  return j.dump(1);
}

FittedEncoder fit_encoder_on_train(const Dataset& mixed, const Cutoffs& cutoffs,
                                   const SchemaPolicy& policy, Zip3Table zip3) {
  Dataset train = mixed.empty_like();
  const auto tags = assign_all(mixed, cutoffs);
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (tags[i] == Split::Train) train.rows.push_back(mixed.rows[i]);
  }
  return FittedEncoder::fit(train, policy, std::move(zip3));
}

}  // namespace mdb
