// Copyright 2026 The fedgbdt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fedgbdt/tree.h"

#include <string>

#include "fedgbdt/error.h"

namespace fedgbdt {

int Tree::Split(int id, int feature, double threshold) {
  Require(id >= 0 && id < static_cast<int>(nodes_.size()) && nodes_[id].is_leaf,
          ErrorCode::kInvalidParameter, "can only split an existing leaf");
  const int left = static_cast<int>(nodes_.size());
  TreeNode child;
  child.depth = nodes_[id].depth + 1;
  nodes_.push_back(child);
  nodes_.push_back(child);
  TreeNode& n = nodes_[id];
  n.is_leaf = false;
  n.feature = feature;
  n.threshold = threshold;
  n.left = left;
  n.right = left + 1;
  n.weight = 0.0;
  return left;
}

int Tree::Route(std::span<const double> x) const {
  int id = 0;
  while (!nodes_[id].is_leaf) {
    const TreeNode& n = nodes_[id];
    id = x[n.feature] <= n.threshold ? n.left : n.right;
  }
  return id;
}

std::vector<int> Tree::Leaves() const {
  std::vector<int> out;
  std::vector<int> queue{0};
  for (std::size_t i = 0; i < queue.size(); ++i) {
    const TreeNode& n = nodes_[queue[i]];
    if (n.is_leaf) {
      out.push_back(queue[i]);
    } else {
      queue.push_back(n.left);
      queue.push_back(n.right);
    }
  }
  return out;
}

std::vector<int> Tree::LeavesAtDepth(int depth) const {
  std::vector<int> out;
  for (int id : Leaves()) {
    if (nodes_[id].depth == depth) out.push_back(id);
  }
  return out;
}

Tree Tree::FromNodes(int max_depth, std::vector<std::size_t> features,
                     std::vector<TreeNode> nodes) {
  Require(!nodes.empty(), ErrorCode::kParse, "tree without nodes");
  const int n = static_cast<int>(nodes.size());
  std::vector<int> parents(n, 0);
  for (int i = 0; i < n; ++i) {
    const TreeNode& node = nodes[i];
    if (node.is_leaf) continue;
    Require(node.left > i && node.left < n && node.right > i && node.right < n &&
                node.feature >= 0,
            ErrorCode::kParse, "node " + std::to_string(i) + " has bad links");
    ++parents[node.left];
    ++parents[node.right];
  }
  for (int i = 1; i < n; ++i) {
    Require(parents[i] == 1, ErrorCode::kParse,
            "node " + std::to_string(i) + " is not reachable exactly once");
  }
  // Depths follow from the links.
  nodes[0].depth = 0;
  for (int i = 0; i < n; ++i) {
    if (nodes[i].is_leaf) continue;
    nodes[nodes[i].left].depth = nodes[i].depth + 1;
    nodes[nodes[i].right].depth = nodes[i].depth + 1;
    Require(nodes[i].depth + 1 <= max_depth, ErrorCode::kParse,
            "tree deeper than its max_depth");
  }
  Tree t(max_depth, std::move(features));
  t.nodes_ = std::move(nodes);
  return t;
}

}  // namespace fedgbdt
