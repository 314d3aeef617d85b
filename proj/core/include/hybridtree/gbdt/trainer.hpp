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

#ifndef HYBRIDTREE_GBDT_TRAINER_HPP_
#define HYBRIDTREE_GBDT_TRAINER_HPP_

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "hybridtree/gbdt/binned.hpp"
#include "hybridtree/gbdt/tree.hpp"

namespace hybridtree {

// U = (sum_L g)^2 / (|I_L| + lambda) + (sum_R g)^2 / (|I_R| + lambda).
// Index sets address entries of `g`.
double split_gain(std::span<const double> g, std::span<const std::size_t> left,
                  std::span<const std::size_t> right, double lambda);
double split_gain(double sum_left, std::size_t count_left, double sum_right,
                  std::size_t count_right, double lambda);

// V = -sum g / (|I| + lambda). Throws ValidationError for an empty set.
double leaf_value(std::span<const double> g, std::span<const std::size_t> rows,
                  double lambda);
double leaf_value(double sum, std::size_t count, double lambda);

// Left-side aggregate of one split candidate at a node.
struct CandidateStats {
  double sum_left = 0;
  std::size_t count_left = 0;
};

struct SplitChoice {
  std::size_t index = 0;
  double gain = 0;
};

// Highest-gain candidate, scanning in the given order and replacing the
// incumbent only on strictly larger gain. Candidates with an empty side are
// skipped. Returns nullopt when nothing qualifies or the best gain is <= 0.
std::optional<SplitChoice> choose_split(std::span<const CandidateStats> candidates,
                                        double total_sum,
                                        std::size_t total_count, double lambda);

// (feature index in a BinnedMatrix, cut index) of a split candidate.
struct CandidateRef {
  std::size_t feature = 0;
  std::size_t cut = 0;
};

// Candidates that leave both sides of the node non-empty, ordered by
// ascending feature id and then ascending threshold. `count_left`, when
// given, receives the left-side size of each.
std::vector<CandidateRef> valid_candidates(const BinnedMatrix& x,
                                           std::span<const std::size_t> rows,
                                           std::vector<std::size_t>* count_left);

// Splits `rows` (ascending) by a candidate; both outputs stay ascending.
void partition_rows(const BinnedMatrix& x, const CandidateRef& c,
                    std::span<const std::size_t> rows,
                    std::vector<std::size_t>& left,
                    std::vector<std::size_t>& right);

// Maps (gradient sum, instance count) of a leaf to its value. Defaults to
// leaf_value with the training lambda.
using LeafRule = std::function<double(double sum, std::size_t count)>;

struct LeafPartition {
  NodeId node_id = 0;
  std::vector<std::size_t> rows;
};

struct TrainedTree {
  Tree tree;
  // One entry per leaf in node-id order: the rows that reached it.
  std::vector<LeafPartition> leaves;
};

// Greedy depth-first tree growth. At depth 1 a node is a leaf; otherwise the
// best candidate by split_gain is applied unless choose_split finds none.
// Ties go to the lowest feature id, then the lowest threshold. `g` is indexed
// by matrix row; `rows` must be ascending and non-empty.
TrainedTree train_tree(const BinnedMatrix& x, std::span<const std::size_t> rows,
                       std::span<const double> g, std::size_t depth,
                       double lambda, const LeafRule& leaf_rule = {});

}  // namespace hybridtree

#endif  // HYBRIDTREE_GBDT_TRAINER_HPP_
