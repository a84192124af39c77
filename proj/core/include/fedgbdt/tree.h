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

#ifndef FEDGBDT_TREE_H_
#define FEDGBDT_TREE_H_

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace fedgbdt {

struct TreeNode {
  bool is_leaf = true;
  int feature = -1;       // internal only
  double threshold = 0.0; // internal only; x <= threshold goes left
  int left = -1;
  int right = -1;
  double weight = 0.0;    // leaf only
  int depth = 0;
};

// Binary split tree stored as a node array; node 0 is the root. While a tree
// is being grown its frontier nodes are leaves with weight 0.
class Tree {
 public:
  Tree() : nodes_(1) {}
  explicit Tree(int max_depth, std::vector<std::size_t> features = {})
      : max_depth_(max_depth), features_(std::move(features)), nodes_(1) {}

  int max_depth() const { return max_depth_; }
  const std::vector<std::size_t>& features() const { return features_; }
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const TreeNode& node(int id) const { return nodes_[id]; }
  std::size_t size() const { return nodes_.size(); }

  // Turns leaf `id` into an internal node; returns the new left child id
  // (the right child is left + 1).
  int Split(int id, int feature, double threshold);
  void SetWeight(int id, double weight) { nodes_[id].weight = weight; }

  // Id of the leaf that x reaches.
  int Route(std::span<const double> x) const;
  double Predict(std::span<const double> x) const { return nodes_[Route(x)].weight; }
  // Leaf ids in breadth-first order.
  std::vector<int> Leaves() const;
  // Leaf ids at exactly `depth`, breadth-first.
  std::vector<int> LeavesAtDepth(int depth) const;

  // Rebuilds from a raw node array (model import). Checks child links.
  static Tree FromNodes(int max_depth, std::vector<std::size_t> features,
                        std::vector<TreeNode> nodes);

 private:
  int max_depth_ = 1;
  std::vector<std::size_t> features_;
  std::vector<TreeNode> nodes_;
};

}  // namespace fedgbdt

#endif  // FEDGBDT_TREE_H_
