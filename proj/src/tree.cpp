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

#include "mdb/tree.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace mdb {

bool TreeNode::goes_left(double x) const {
  if (!categorical) return x <= threshold;
  const auto code = static_cast<std::int32_t>(std::lround(x));
  return std::binary_search(left_categories.begin(), left_categories.end(), code);
}

std::size_t Tree::leaf_index(std::span<const double> row) const {
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const TreeNode& n = nodes[i];
    i = static_cast<std::size_t>(n.goes_left(row[static_cast<std::size_t>(n.feature)]) ? n.left : n.right);
  }
  return i;
}

int Tree::depth() const {
  if (nodes.empty()) return 0;
  int best = 0;
  std::vector<std::pair<std::size_t, int>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [i, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    if (!nodes[i].is_leaf()) {
      stack.emplace_back(static_cast<std::size_t>(nodes[i].left), d + 1);
      stack.emplace_back(static_cast<std::size_t>(nodes[i].right), d + 1);
    }
  }
  return best;
}

std::size_t Tree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

std::vector<std::int32_t> Tree::used_features() const {
  std::vector<std::int32_t> out;
  for (const auto& n : nodes) {
    if (!n.is_leaf()) out.push_back(n.feature);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace mdb
