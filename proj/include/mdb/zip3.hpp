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

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace mdb {

struct LatLon {
  double latitude = 0.0;
  double longitude = 0.0;
};

// 3-digit ZIP prefix to an approximate centroid.
class Zip3Table {
 public:
  // Throws PreconditionError on a prefix that is not 3 digits or coordinates
  // outside [-90, 90] x [-180, 180].
  void add(std::string_view prefix, LatLon where);

  // Looks up the first three characters of a ZIP code.
  std::optional<LatLon> lookup(std::string_view zip) const;

  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, LatLon, std::less<>>& entries() const { return entries_; }

  // Small table covering the prefixes used by the synthetic generator.
  static Zip3Table builtin();
  // 3-column delimited file: prefix, latitude, longitude. '#' lines skipped.
  static Zip3Table load(const std::filesystem::path& path, char delimiter = '|');
  void save(const std::filesystem::path& path, char delimiter = '|') const;

 private:
  std::map<std::string, LatLon, std::less<>> entries_;
};

}  // namespace mdb
