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

#include "mdb/zip3.hpp"

#include <algorithm>
#include <fstream>

#include "mdb/core.hpp"
#include "mdb/text.hpp"

namespace mdb {

namespace {
bool three_digits(std::string_view s) {
  return s.size() == 3 && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}
}  // namespace

void Zip3Table::add(std::string_view prefix, LatLon where) {
  if (!three_digits(prefix)) {
    throw PreconditionError("ZIP3 prefix must be exactly 3 digits: '" + std::string(prefix) + "'");
  }
  if (!(where.latitude >= -90.0 && where.latitude <= 90.0) ||
      !(where.longitude >= -180.0 && where.longitude <= 180.0)) {
    throw PreconditionError("ZIP3 coordinates out of range for prefix " + std::string(prefix));
  }
  entries_[std::string(prefix)] = where;
}

std::optional<LatLon> Zip3Table::lookup(std::string_view zip) const {
  zip = text::trim(zip);
  if (zip.size() < 3) return std::nullopt;
  const auto it = entries_.find(zip.substr(0, 3));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

Zip3Table Zip3Table::builtin() {
  static constexpr struct {
    const char* prefix;
    double lat, lon;
  } kRows[] = {
      {"021", 42.36, -71.06},  {"100", 40.78, -73.97},  {"152", 40.44, -80.00},
      {"191", 39.95, -75.16},  {"200", 38.90, -77.03},  {"282", 35.23, -80.84},
      {"303", 33.75, -84.39},  {"327", 28.54, -81.38},  {"331", 25.77, -80.19},
      {"336", 27.95, -82.46},  {"372", 36.16, -86.78},  {"402", 38.25, -85.76},
      {"432", 39.96, -83.00},  {"462", 39.77, -86.16},  {"482", 42.35, -83.06},
      {"532", 43.04, -87.91},  {"551", 44.95, -93.09},  {"606", 41.88, -87.63},
      {"631", 38.63, -90.20},  {"641", 39.10, -94.58},  {"681", 41.26, -95.94},
      {"701", 29.95, -90.07},  {"731", 35.47, -97.52},  {"750", 32.78, -96.80},
      {"770", 29.76, -95.37},  {"787", 30.27, -97.74},  {"802", 39.74, -104.99},
      {"841", 40.76, -111.89}, {"850", 33.45, -112.07}, {"871", 35.08, -106.65},
      {"891", 36.17, -115.14}, {"900", 34.05, -118.24}, {"902", 34.09, -118.41},
      {"921", 32.72, -117.16}, {"941", 37.77, -122.42}, {"945", 37.80, -122.27},
      {"958", 38.58, -121.49}, {"967", 21.31, -157.86}, {"972", 45.52, -122.68},
      {"981", 47.61, -122.33}, {"995", 61.22, -149.90},
  };
  Zip3Table t;
  for (const auto& r : kRows) t.add(r.prefix, {r.lat, r.lon});
  return t;
}

Zip3Table Zip3Table::load(const std::filesystem::path& path, char delimiter) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open ZIP3 table " + path.string());
  Zip3Table t;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto l = text::trim(line);
    if (l.empty() || l.front() == '#') continue;
    const auto f = text::split(l, delimiter);
    const auto lat = f.size() == 3 ? text::parse_double(f[1]) : std::nullopt;
    const auto lon = f.size() == 3 ? text::parse_double(f[2]) : std::nullopt;
    if (!lat || !lon) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) +
                       ": expected prefix, latitude, longitude");
    }
    t.add(text::trim(f[0]), {*lat, *lon});
  }
  return t;
}

void Zip3Table::save(const std::filesystem::path& path, char delimiter) const {
  std::ofstream os(path);
  if (!os) throw Error("cannot write ZIP3 table " + path.string());
  os << "# prefix" << delimiter << "latitude" << delimiter << "longitude\n";
  for (const auto& [prefix, ll] : entries_) {
    os << prefix << delimiter << text::format_double(ll.latitude) << delimiter
       << text::format_double(ll.longitude) << '\n';
  }
}

}  // namespace mdb
