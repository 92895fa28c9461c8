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

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "mdb/core.hpp"
#include "mdb/random.hpp"
#include "mdb/text.hpp"

using namespace mdb;

TEST(Period, ParsesMonthYearText) {
  EXPECT_EQ(parse_period("052023"), Period(5, 2023));
  EXPECT_EQ(parse_period("122024"), Period(12, 2024));
}

TEST(Period, RejectsMonthThirteen) {
  try {
    parse_period("132023");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("132023"), std::string::npos);
  }
}

TEST(Period, RejectsMalformedText) {
  for (const char* bad : {"", "52023", "0520233", "05-023", "ab2023", "002023", " 52023"}) {
    EXPECT_THROW(parse_period(bad), ParseError) << bad;
  }
}

TEST(Period, ConstructorValidatesRanges) {
  EXPECT_THROW(Period(0, 2023), PreconditionError);
  EXPECT_THROW(Period(13, 2023), PreconditionError);
  EXPECT_THROW(Period(1, 1899), PreconditionError);
  EXPECT_NO_THROW(Period(12, 9999));
}

TEST(Period, TextRoundTripOverManyYears) {
  for (int y = 1990; y <= 2040; ++y) {
    for (int m = 1; m <= 12; ++m) {
      const Period p(m, y);
      const std::string s = format_period(p);
      ASSERT_EQ(s.size(), 6u);
      EXPECT_EQ(parse_period(s), p);
    }
  }
}

TEST(Period, OrderingIsYearThenMonth) {
  EXPECT_LT(Period(12, 2023), Period(1, 2024));
  EXPECT_LT(Period(1, 2024), Period(2, 2024));
  EXPECT_GT(Period(1, 2025), Period(11, 2024));
  // Ordering agrees with ordinals everywhere on a grid.
  for (int a = 1400; a < 1460; a += 7) {
    for (int b = 1400; b < 1460; b += 5) {
      EXPECT_EQ(Period::from_ordinal(a) < Period::from_ordinal(b), a < b);
    }
  }
}

TEST(Period, MonthsBetween) {
  EXPECT_EQ(months_between(Period(1, 2023), Period(4, 2023)), 3);
  EXPECT_EQ(months_between(Period(11, 2023), Period(2, 2024)), 3);
  const Period p(7, 2021);
  EXPECT_EQ(months_between(p, p), 0);
  EXPECT_EQ(months_between(Period(2, 2024), Period(11, 2023)), -3);
}

TEST(Period, AddMonthsInvertsMonthsBetween) {
  const Period base(3, 2022);
  for (int k = -30; k <= 30; ++k) {
    const Period q = add_months(base, k);
    EXPECT_EQ(months_between(base, q), k);
  }
}

TEST(Label, DlqStatusRule) {
  EXPECT_EQ(label_row(0), Label::Negative);
  EXPECT_EQ(label_row(1), Label::Positive);
  EXPECT_EQ(label_row(7), Label::Positive);
  EXPECT_THROW(label_row(-1), PreconditionError);
}

TEST(Dataset, ColumnLookup) {
  Dataset d{{"A", "B"}, {"C"}, {}};
  EXPECT_EQ(d.numeric_index("B"), 1u);
  EXPECT_EQ(d.categorical_index("C"), 0u);
  EXPECT_FALSE(d.numeric_index("C"));
  const Dataset e = d.empty_like();
  EXPECT_EQ(e.numeric_names, d.numeric_names);
  EXPECT_TRUE(e.rows.empty());
}

TEST(Random, DeriveSeedSeparatesStreams) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 20; ++a) {
    for (std::uint64_t b = 0; b < 20; ++b) seen.insert(derive_seed(42, {a, b}));
  }
  EXPECT_EQ(seen.size(), 400u);
  EXPECT_EQ(derive_seed(42, {1, 2}), derive_seed(42, {1, 2}));
  EXPECT_NE(derive_seed(42, {1, 2}), derive_seed(42, {2, 1}));
  EXPECT_NE(derive_seed(42, {1}), derive_seed(43, {1}));
}

TEST(Random, UniformIndexStaysInRangeAndCoversIt) {
  Rng rng(5);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const std::size_t k = uniform_index(rng, 7);
    ASSERT_LT(k, 7u);
    ++hits[k];
  }
  for (const int h : hits) EXPECT_GT(h, 800);
}

TEST(Random, ShuffleIsAPermutation) {
  Rng rng(9);
  std::vector<int> v(100);
  std::iota(v.begin(), v.end(), 0);
  shuffle_in_place(std::span<int>(v), rng);
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sorted[i], i);
  EXPECT_FALSE(std::is_sorted(v.begin(), v.end()));
}

TEST(Text, SplitKeepsEmptyFields) {
  const auto f = text::split("a||b|", '|');
  ASSERT_EQ(f.size(), 4u);
  EXPECT_EQ(f[1], "");
  EXPECT_EQ(f[3], "");
}

TEST(Text, NumberParsing) {
  EXPECT_EQ(text::parse_double("2.5"), 2.5);
  EXPECT_FALSE(text::parse_double("2.5x"));
  EXPECT_FALSE(text::parse_double(""));
  EXPECT_EQ(text::parse_int("-12"), -12);
  EXPECT_FALSE(text::parse_int("X"));
}

TEST(Text, FormatDoubleRoundTrips) {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double v = (uniform_unit(rng) - 0.5) * std::pow(10.0, static_cast<int>(uniform_index(rng, 20)) - 10);
    EXPECT_EQ(text::parse_double(text::format_double(v)), v);
  }
}
