/*
 * Copyright 2026 The HybridTree Authors.
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

#ifndef HYBRIDTREE_GBDT_TREE_HPP_
#define HYBRIDTREE_GBDT_TREE_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include <nlohmann/json.hpp>

#include "hybridtree/common/types.hpp"
#include "hybridtree/data/dataset.hpp"

namespace hybridtree {

using NodeId = std::int32_t;

struct SplitCondition {
  FeatureId feature_id = 0;
  double threshold = 0;

  // Missing values always go left.
  bool goes_left(double value) const {
    return is_missing(value) || value < threshold;
  }
  bool operator==(const SplitCondition&) const = default;
};

struct TreeNode {
  bool is_leaf = true;
  SplitCondition split;
  NodeId left = -1;
  NodeId right = -1;
  double value = 0;

  bool operator==(const TreeNode&) const = default;
};

// Strict binary tree stored in preorder: node 0 is the root and a split
// node's left subtree immediately follows it. Node ids are therefore stable
// across serialization.
class Tree {
 public:
  // A single leaf with value 0.
  Tree();
  // Validates structure: preorder layout, two children per split node,
  // finite leaf values.
  explicit Tree(std::vector<TreeNode> nodes);

  static Tree leaf(double value);

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const TreeNode& node(NodeId id) const { return nodes_.at(id); }
  std::size_t size() const { return nodes_.size(); }
  // Layers counted inclusive of the leaf layer; a single leaf has depth 1.
  std::size_t depth() const;
  std::vector<NodeId> leaf_ids() const;
  std::size_t num_leaves() const { return leaf_ids().size(); }
  std::set<FeatureId> features_used() const;

  // Follows split conditions to a leaf. `x(feature)` returns the value of
  // `feature` for the instance being routed.
  template <typename Lookup>
  NodeId route(const Lookup& x) const {
    NodeId id = 0;
    while (!nodes_[id].is_leaf) {
      const TreeNode& n = nodes_[id];
      id = n.split.goes_left(x(n.split.feature_id)) ? n.left : n.right;
    }
    return id;
  }
  template <typename Lookup>
  double predict(const Lookup& x) const {
    return nodes_[route(x)].value;
  }

  // Copy with leaf values replaced, keyed by leaf node id.
  Tree with_leaf_values(const std::map<NodeId, double>& values) const;

  // Nested {feature, threshold, left, right} | {leaf} document.
  nlohmann::json to_json() const;
  static Tree from_json(const nlohmann::json& j);

  bool operator==(const Tree&) const = default;

 private:
  std::vector<TreeNode> nodes_;
};

// Index of the last-layer node of `tree` that `x` reaches.
template <typename Lookup>
NodeId route_to_last_layer(const Tree& tree, const Lookup& x) {
  return tree.route(x);
}

// Replaces selected leaves of `top` with whole subtrees. Leaves without an
// entry are kept. The result is renumbered in preorder.
Tree stitch(const Tree& top, const std::map<NodeId, Tree>& bottoms);

// Resolves feature ids to columns of one dataset once, for fast routing.
class ColumnLookup {
 public:
  ColumnLookup(const Dataset& data, const std::set<FeatureId>& features);

  // Feature accessor for one row; throws ValidationError for unknown
  // features.
  struct Row {
    const ColumnLookup* lookup;
    std::size_t row;
    double operator()(FeatureId feature) const;
  };
  Row row(std::size_t r) const { return {this, r}; }

 private:
  const Dataset* data_;
  std::map<FeatureId, std::size_t> columns_;
};

}  // namespace hybridtree

#endif  // HYBRIDTREE_GBDT_TREE_HPP_
