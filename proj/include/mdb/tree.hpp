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

#include <cstdint>
#include <span>
#include <vector>

namespace mdb {

// Node of a binary decision tree stored in a flat array. A node with
// feature < 0 is a leaf and carries a score in `value`.
struct TreeNode {
  std::int32_t feature = -1;
  bool categorical = false;
  // Numeric split: x <= threshold goes left.
  double threshold = 0.0;
  // Categorical split: codes in this sorted set go left, all others right.
  std::vector<std::int32_t> left_categories;
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;

  bool is_leaf() const { return feature < 0; }
  bool goes_left(double x) const;

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct Tree {
  std::vector<TreeNode> nodes;

  // Index of the leaf reached by `row`.
  std::size_t leaf_index(std::span<const double> row) const;
  double predict(std::span<const double> row) const { return nodes[leaf_index(row)].value; }
  // Root-only tree has depth 0.
  int depth() const;
  std::size_t leaf_count() const;
  // Features referenced by any split.
  std::vector<std::int32_t> used_features() const;

  friend bool operator==(const Tree&, const Tree&) = default;
};

}  // namespace mdb
