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

#include "hybridtree/gbdt/tree.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include "hybridtree/common/error.hpp"

namespace hybridtree {
namespace {

// Returns one past the last node of the subtree rooted at `id`.
std::size_t check_subtree(const std::vector<TreeNode>& nodes, std::size_t id) {
  if (id >= nodes.size()) {
    throw ValidationError("tree node " + std::to_string(id) + " out of range");
  }
  const TreeNode& n = nodes[id];
  if (n.is_leaf) {
    if (!std::isfinite(n.value)) {
      throw ValidationError("leaf " + std::to_string(id) +
                            " has a non-finite value");
    }
    return id + 1;
  }
  if (n.left != static_cast<NodeId>(id + 1)) {
    throw ValidationError("split node " + std::to_string(id) +
                          " is not in preorder layout");
  }
  std::size_t end = check_subtree(nodes, id + 1);
  if (n.right != static_cast<NodeId>(end)) {
    throw ValidationError("split node " + std::to_string(id) +
                          " has a misplaced right child");
  }
  return check_subtree(nodes, end);
}

void append_json(const nlohmann::json& j, std::vector<TreeNode>& out) {
  TreeNode n;
  if (j.contains("leaf")) {
    n.value = j.at("leaf").get<double>();
    out.push_back(n);
    return;
  }
  n.is_leaf = false;
  n.split.feature_id = j.at("feature").get<FeatureId>();
  n.split.threshold = j.at("threshold").get<double>();
  const std::size_t self = out.size();
  out.push_back(n);
  out[self].left = static_cast<NodeId>(out.size());
  append_json(j.at("left"), out);
  out[self].right = static_cast<NodeId>(out.size());
  append_json(j.at("right"), out);
}

}  // namespace

Tree::Tree() : nodes_{TreeNode{}} {}

Tree::Tree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw ValidationError("tree has no nodes");
  if (check_subtree(nodes_, 0) != nodes_.size()) {
    throw ValidationError("tree has unreachable nodes");
  }
}

Tree Tree::leaf(double value) {
  TreeNode n;
  n.value = value;
  return Tree(std::vector<TreeNode>{n});
}

std::size_t Tree::depth() const {
  std::vector<std::size_t> level(nodes_.size(), 1);
  std::size_t deepest = 1;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (!nodes_[i].is_leaf) {
      level[nodes_[i].left] = level[i] + 1;
      level[nodes_[i].right] = level[i] + 1;
    }
  }
  return deepest;
}

std::vector<NodeId> Tree::leaf_ids() const {
  std::vector<NodeId> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].is_leaf) out.push_back(static_cast<NodeId>(i));
  }
  return out;
}

std::set<FeatureId> Tree::features_used() const {
  std::set<FeatureId> out;
  for (const auto& n : nodes_) {
    if (!n.is_leaf) out.insert(n.split.feature_id);
  }
  return out;
}

Tree Tree::with_leaf_values(const std::map<NodeId, double>& values) const {
  std::vector<TreeNode> nodes = nodes_;
  for (const auto& [id, v] : values) {
    if (id < 0 || static_cast<std::size_t>(id) >= nodes.size() ||
        !nodes[id].is_leaf) {
      throw ValidationError("node " + std::to_string(id) + " is not a leaf");
    }
    nodes[id].value = v;
  }
  return Tree(std::move(nodes));
}

nlohmann::json Tree::to_json() const {
  std::function<nlohmann::json(NodeId)> emit = [&](NodeId id) {
    const TreeNode& n = nodes_[id];
    if (n.is_leaf) return nlohmann::json{{"leaf", n.value}};
    return nlohmann::json{{"feature", n.split.feature_id},
                          {"threshold", n.split.threshold},
                          {"left", emit(n.left)},
                          {"right", emit(n.right)}};
  };
  return emit(0);
}

Tree Tree::from_json(const nlohmann::json& j) {
  std::vector<TreeNode> nodes;
  try {
    append_json(j, nodes);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed tree: ") + e.what(), 0);
  }
  return Tree(std::move(nodes));
}

Tree stitch(const Tree& top, const std::map<NodeId, Tree>& bottoms) {
  std::vector<TreeNode> out;
  std::function<void(const Tree&, NodeId, bool)> copy =
      [&](const Tree& t, NodeId id, bool graft) {
        const TreeNode& n = t.node(id);
        if (n.is_leaf) {
          auto it = graft ? bottoms.find(id) : bottoms.end();
          if (it != bottoms.end()) {
            copy(it->second, 0, false);
          } else {
            out.push_back(n);
          }
          return;
        }
        const std::size_t self = out.size();
        out.push_back(n);
        out[self].left = static_cast<NodeId>(out.size());
        copy(t, n.left, graft);
        out[self].right = static_cast<NodeId>(out.size());
        copy(t, n.right, graft);
      };
  copy(top, 0, true);
  return Tree(std::move(out));
}

ColumnLookup::ColumnLookup(const Dataset& data,
                           const std::set<FeatureId>& features)
    : data_(&data) {
  for (FeatureId f : features) {
    auto col = data.column_of(f);
    if (!col) {
      throw ValidationError("dataset lacks feature " + std::to_string(f) +
                            " required by the model");
    }
    columns_.emplace(f, *col);
  }
}

double ColumnLookup::Row::operator()(FeatureId feature) const {
  auto it = lookup->columns_.find(feature);
  if (it == lookup->columns_.end()) {
    throw ValidationError("feature " + std::to_string(feature) +
                          " is not available for routing");
  }
  return lookup->data_->value(row, it->second);
}

}  // namespace hybridtree
