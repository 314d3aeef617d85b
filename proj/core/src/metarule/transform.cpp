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

#include "hybridtree/metarule/transform.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>

#include "hybridtree/common/error.hpp"

namespace hybridtree {

namespace {

std::set<FeatureId> features_of(const Tree& a, const Tree& b) {
  std::set<FeatureId> f = a.features_used();
  for (FeatureId x : b.features_used()) f.insert(x);
  return f;
}

class Rebuilder {
 public:
  Rebuilder(const Tree& tree, RuleCondition fg, std::vector<RuleCondition> others)
      : tree_(tree), fg_(fg), others_(std::move(others)) {}

  void emit(NodeId id) {
    const TreeNode& n = tree_.node(id);
    const std::size_t at = out_.size();
    out_.push_back(n);
    fresh_.push_back(false);
    if (n.is_leaf) return;
    if (n.split == fg_.split && path_satisfies_rule()) {
      found_ = true;
      const NodeId rule_side = fg_.left ? n.left : n.right;
      const NodeId other_side = fg_.left ? n.right : n.left;
      if (tree_.node(rule_side).is_leaf && !tree_.node(other_side).is_leaf) {
        out_.pop_back();
        fresh_.pop_back();
        append_below(other_side, tree_.node(rule_side).value);
        return;
      }
    }
    out_[at].left = static_cast<NodeId>(out_.size());
    path_.push_back({n.split, true});
    emit(n.left);
    path_.back().left = false;
    out_[at].right = static_cast<NodeId>(out_.size());
    emit(n.right);
    path_.pop_back();
  }

  bool found() const { return found_; }
  std::vector<TreeNode>& nodes() { return out_; }
  const std::vector<bool>& fresh() const { return fresh_; }

 private:
  bool path_satisfies_rule() const {
    return std::all_of(others_.begin(), others_.end(), [&](const RuleCondition& c) {
      return std::any_of(path_.begin(), path_.end(),
                         [&](const RuleCondition& p) { return p.matches(c); });
    });
  }

  // Copies the subtree at `id`, re-testing F_g below each of its leaves.
  void append_below(NodeId id, double rule_value) {
    const TreeNode& n = tree_.node(id);
    const std::size_t at = out_.size();
    if (n.is_leaf) {
      TreeNode split;
      split.is_leaf = false;
      split.split = fg_.split;
      out_.push_back(split);
      fresh_.push_back(false);
      TreeNode rule_leaf;
      rule_leaf.value = rule_value;
      TreeNode kept;
      kept.value = n.value;
      out_[at].left = static_cast<NodeId>(out_.size());
      out_.push_back(fg_.left ? rule_leaf : kept);
      fresh_.push_back(true);
      out_[at].right = static_cast<NodeId>(out_.size());
      out_.push_back(fg_.left ? kept : rule_leaf);
      fresh_.push_back(true);
      return;
    }
    out_.push_back(n);
    fresh_.push_back(false);
    out_[at].left = static_cast<NodeId>(out_.size());
    append_below(n.left, rule_value);
    out_[at].right = static_cast<NodeId>(out_.size());
    append_below(n.right, rule_value);
  }

  const Tree& tree_;
  RuleCondition fg_;
  std::vector<RuleCondition> others_;
  std::vector<RuleCondition> path_;
  std::vector<TreeNode> out_;
  std::vector<bool> fresh_;
  bool found_ = false;
};

}  // namespace

Tree transform_tree(const Tree& tree, const SplitRule& meta_rule,
                    const std::set<FeatureId>& guest_features,
                    const LeafRecompute* recompute) {
  std::optional<std::size_t> g;
  for (std::size_t i = meta_rule.conditions.size(); i-- > 0;) {
    if (guest_features.count(meta_rule.conditions[i].split.feature_id)) {
      g = i;
      break;
    }
  }
  if (!g) throw ValidationError("meta-rule has no condition on a guest feature");
  std::vector<RuleCondition> others = meta_rule.conditions;
  others.erase(others.begin() + static_cast<std::ptrdiff_t>(*g));

  Rebuilder b(tree, meta_rule.conditions[*g], std::move(others));
  b.emit(0);
  if (!b.found()) {
    throw ValidationError("tree has no split on x[" +
                          std::to_string(meta_rule.conditions[*g].split.feature_id) +
                          "] under the rule's other conditions");
  }
  std::vector<TreeNode>& nodes = b.nodes();

  if (recompute && recompute->data) {
    const Dataset& data = *recompute->data;
    if (recompute->gradients.size() != data.num_instances()) {
      throw ValidationError("gradients do not match the dataset rows");
    }
    const Tree shape(nodes);
    const ColumnLookup lookup(data, shape.features_used());
    std::map<NodeId, std::pair<double, std::size_t>> acc;
    for (std::size_t r = 0; r < data.num_instances(); ++r) {
      const NodeId leaf = shape.route(lookup.row(r));
      if (!b.fresh()[leaf]) continue;
      auto& [sum, count] = acc[leaf];
      sum += recompute->gradients[r];
      ++count;
    }
    for (const auto& [leaf, sc] : acc) {
      nodes[leaf].value = -sc.first / (static_cast<double>(sc.second) + recompute->lambda);
    }
  }
  return Tree(std::move(nodes));
}

double TransformationReport::mean_gap() const {
  return std::abs(mean_pred_a - mean_pred_b);
}

nlohmann::json TransformationReport::to_json() const {
  nlohmann::json ls = nlohmann::json::array();
  for (const auto& l : leaves) {
    ls.push_back({{"leaf_b", l.leaf_b},
                  {"leaf_a", l.leaf_a},
                  {"support", l.support},
                  {"expectation_b", l.expectation_b},
                  {"expectation_a", l.expectation_a},
                  {"gap", l.gap}});
  }
  return {{"mean_pred_a", mean_pred_a},
          {"mean_pred_b", mean_pred_b},
          {"mean_gap", mean_gap()},
          {"max_leaf_gap", max_leaf_gap},
          {"leaves", ls}};
}

TransformationReport verify_transformation(const Tree& tree_a, const Tree& tree_b,
                                           const Dataset& data,
                                           std::span<const double> gradients) {
  const std::size_t n = data.num_instances();
  if (gradients.size() != n) {
    throw ValidationError("gradients do not match the dataset rows");
  }
  const ColumnLookup lookup(data, features_of(tree_a, tree_b));
  TransformationReport out;
  std::map<std::pair<NodeId, NodeId>, std::pair<double, std::size_t>> cells;
  std::map<NodeId, std::pair<double, std::size_t>> a_leaves;
  double sum_a = 0;
  double sum_b = 0;
  for (std::size_t r = 0; r < n; ++r) {
    const NodeId la = tree_a.route(lookup.row(r));
    const NodeId lb = tree_b.route(lookup.row(r));
    sum_a += tree_a.node(la).value;
    sum_b += tree_b.node(lb).value;
    auto& cell = cells[{lb, la}];
    cell.first += gradients[r];
    ++cell.second;
    auto& whole = a_leaves[la];
    whole.first += gradients[r];
    ++whole.second;
  }
  if (n > 0) {
    out.mean_pred_a = sum_a / static_cast<double>(n);
    out.mean_pred_b = sum_b / static_cast<double>(n);
  }
  for (const auto& [key, cell] : cells) {
    const auto& whole = a_leaves.at(key.second);
    LeafGap gap;
    gap.leaf_b = key.first;
    gap.leaf_a = key.second;
    gap.support = cell.second;
    gap.expectation_b = -cell.first / static_cast<double>(cell.second);
    gap.expectation_a = -whole.first / static_cast<double>(whole.second);
    gap.gap = std::abs(gap.expectation_b - gap.expectation_a);
    out.max_leaf_gap = std::max(out.max_leaf_gap, gap.gap);
    out.leaves.push_back(gap);
  }
  return out;
}

}  // namespace hybridtree
