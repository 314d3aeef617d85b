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

#ifndef HYBRIDTREE_METARULE_TRANSFORM_HPP_
#define HYBRIDTREE_METARULE_TRANSFORM_HPP_

#include <cstddef>
#include <set>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "hybridtree/data/dataset.hpp"
#include "hybridtree/gbdt/tree.hpp"
#include "hybridtree/metarule/meta_rule.hpp"

namespace hybridtree {

// Training rows and gradients used to recompute leaves created by
// transform_tree.
struct LeafRecompute {
  const Dataset* data = nullptr;
  std::span<const double> gradients;
  double lambda = 1.0;
};

// Moves the guest condition F_g of `meta_rule` (its last condition on a
// feature in `guest_features`) to the last split layer. At every node
// splitting on F_g whose path satisfies the rule's other conditions, with a
// leaf on the rule's side of F_g and a subtree on the other side, the node
// is replaced by that subtree and F_g is re-tested below each of its leaves:
// the rule side gets a new leaf, the other side keeps the subtree leaf. New
// leaves take -sum g / (n + lambda) over the rows reaching them when
// `recompute` is given and reached, the value of the replaced rule-side leaf
// otherwise. Nodes where F_g already sits above two leaves are unchanged.
// Throws ValidationError when the rule has no guest condition or the tree
// has no node splitting on it under the rule's other conditions.
Tree transform_tree(const Tree& tree, const SplitRule& meta_rule,
                    const std::set<FeatureId>& guest_features,
                    const LeafRecompute* recompute = nullptr);

// A leaf of tree B compared with one tree-A leaf its rows came from.
struct LeafGap {
  NodeId leaf_b = 0;
  NodeId leaf_a = 0;
  std::size_t support = 0;
  // -mean g over the rows in both leaves.
  double expectation_b = 0;
  // -mean g over all rows of the tree-A leaf.
  double expectation_a = 0;
  double gap = 0;
};

struct TransformationReport {
  double mean_pred_a = 0;
  double mean_pred_b = 0;
  double max_leaf_gap = 0;
  std::vector<LeafGap> leaves;

  double mean_gap() const;
  nlohmann::json to_json() const;
};

// Empirical mean predictions of both trees over `data`, and for every
// non-empty (leaf of B, leaf of A) cell the gap between the gradient-mean
// leaf expectation of the cell and of the whole A leaf.
TransformationReport verify_transformation(const Tree& tree_a, const Tree& tree_b,
                                           const Dataset& data,
                                           std::span<const double> gradients);

}  // namespace hybridtree

#endif  // HYBRIDTREE_METARULE_TRANSFORM_HPP_
