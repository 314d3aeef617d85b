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

#include "hybridtree/gbdt/trainer.hpp"

#include <string>
#include <utility>

#include "hybridtree/common/error.hpp"

namespace hybridtree {
namespace {

double sum_over(std::span<const double> g, std::span<const std::size_t> rows) {
  double s = 0;
  for (std::size_t r : rows) s += g[r];
  return s;
}

class Grower {
 public:
  Grower(const BinnedMatrix& x, std::span<const double> g, double lambda,
         const LeafRule& rule)
      : x_(x), g_(g), lambda_(lambda), rule_(rule) {}

  void grow(std::vector<std::size_t> rows, std::size_t depth) {
    const double total = sum_over(g_, rows);
    std::vector<std::size_t> counts;
    std::vector<CandidateRef> refs;
    if (depth > 1) refs = valid_candidates(x_, rows, &counts);

    std::optional<SplitChoice> best;
    if (!refs.empty()) {
      auto stats = left_sums(rows, refs, counts);
      best = choose_split(stats, total, rows.size(), lambda_);
    }
    if (!best) {
      TreeNode leaf;
      leaf.value = rule_ ? rule_(total, rows.size())
                         : leaf_value(total, rows.size(), lambda_);
      leaves_.push_back({static_cast<NodeId>(nodes_.size()), std::move(rows)});
      nodes_.push_back(leaf);
      return;
    }

    const CandidateRef& c = refs[best->index];
    std::vector<std::size_t> left, right;
    partition_rows(x_, c, rows, left, right);
    rows.clear();
    rows.shrink_to_fit();

    TreeNode split;
    split.is_leaf = false;
    split.split = {x_.feature_id(c.feature), x_.cuts(c.feature)[c.cut]};
    const std::size_t self = nodes_.size();
    nodes_.push_back(split);
    nodes_[self].left = static_cast<NodeId>(nodes_.size());
    grow(std::move(left), depth - 1);
    nodes_[self].right = static_cast<NodeId>(nodes_.size());
    grow(std::move(right), depth - 1);
  }

  TrainedTree finish() {
    return {Tree(std::move(nodes_)), std::move(leaves_)};
  }

 private:
  std::vector<CandidateStats> left_sums(std::span<const std::size_t> rows,
                                        const std::vector<CandidateRef>& refs,
                                        const std::vector<std::size_t>& counts) {
    std::vector<CandidateStats> stats(refs.size());
    std::vector<double> hist;
    std::size_t i = 0;
    while (i < refs.size()) {
      const std::size_t k = refs[i].feature;
      auto bins = x_.bins(k);
      hist.assign(x_.cuts(k).size() + 1, 0.0);
      for (std::size_t r : rows) hist[bins[r]] += g_[r];
      double prefix = 0;
      std::size_t next_bin = 0;
      for (; i < refs.size() && refs[i].feature == k; ++i) {
        for (; next_bin <= refs[i].cut; ++next_bin) prefix += hist[next_bin];
        stats[i] = {prefix, counts[i]};
      }
    }
    return stats;
  }

  const BinnedMatrix& x_;
  std::span<const double> g_;
  double lambda_;
  const LeafRule& rule_;
  std::vector<TreeNode> nodes_;
  std::vector<LeafPartition> leaves_;
};

}  // namespace

double split_gain(std::span<const double> g, std::span<const std::size_t> left,
                  std::span<const std::size_t> right, double lambda) {
  return split_gain(sum_over(g, left), left.size(), sum_over(g, right),
                    right.size(), lambda);
}

double split_gain(double sum_left, std::size_t count_left, double sum_right,
                  std::size_t count_right, double lambda) {
  auto term = [lambda](double s, std::size_t n) {
    const double denom = static_cast<double>(n) + lambda;
    return denom > 0 ? s * s / denom : 0.0;
  };
  return term(sum_left, count_left) + term(sum_right, count_right);
}

double leaf_value(std::span<const double> g, std::span<const std::size_t> rows,
                  double lambda) {
  if (rows.empty()) throw ValidationError("leaf value of an empty instance set");
  return leaf_value(sum_over(g, rows), rows.size(), lambda);
}

double leaf_value(double sum, std::size_t count, double lambda) {
  if (count == 0) throw ValidationError("leaf value of an empty instance set");
  return -sum / (static_cast<double>(count) + lambda);
}

std::optional<SplitChoice> choose_split(std::span<const CandidateStats> candidates,
                                        double total_sum,
                                        std::size_t total_count, double lambda) {
  std::optional<SplitChoice> best;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    if (c.count_left == 0 || c.count_left >= total_count) continue;
    const double gain = split_gain(c.sum_left, c.count_left,
                                   total_sum - c.sum_left,
                                   total_count - c.count_left, lambda);
    if (!best || gain > best->gain) best = SplitChoice{i, gain};
  }
  if (best && !(best->gain > 0)) return std::nullopt;
  return best;
}

std::vector<CandidateRef> valid_candidates(const BinnedMatrix& x,
                                           std::span<const std::size_t> rows,
                                           std::vector<std::size_t>* count_left) {
  std::vector<CandidateRef> out;
  if (count_left) count_left->clear();
  std::vector<std::size_t> hist;
  for (std::size_t k = 0; k < x.num_features(); ++k) {
    auto bins = x.bins(k);
    const std::size_t n_cuts = x.cuts(k).size();
    hist.assign(n_cuts + 1, 0);
    for (std::size_t r : rows) ++hist[bins[r]];
    std::size_t left = 0;
    for (std::size_t j = 0; j < n_cuts; ++j) {
      left += hist[j];
      if (left == 0) continue;
      if (left == rows.size()) break;
      out.push_back({k, j});
      if (count_left) count_left->push_back(left);
    }
  }
  return out;
}

void partition_rows(const BinnedMatrix& x, const CandidateRef& c,
                    std::span<const std::size_t> rows,
                    std::vector<std::size_t>& left,
                    std::vector<std::size_t>& right) {
  auto bins = x.bins(c.feature);
  left.clear();
  right.clear();
  for (std::size_t r : rows) {
    (bins[r] <= c.cut ? left : right).push_back(r);
  }
}

TrainedTree train_tree(const BinnedMatrix& x, std::span<const std::size_t> rows,
                       std::span<const double> g, std::size_t depth,
                       double lambda, const LeafRule& leaf_rule) {
  if (depth < 1) throw ValidationError("tree depth must be at least 1");
  if (rows.empty()) throw ValidationError("cannot train a tree on no instances");
  if (g.size() != x.num_rows()) {
    throw ValidationError("gradient vector does not match the feature matrix");
  }
  Grower grower(x, g, lambda, leaf_rule);
  grower.grow(std::vector<std::size_t>(rows.begin(), rows.end()), depth);
  return grower.finish();
}

}  // namespace hybridtree
