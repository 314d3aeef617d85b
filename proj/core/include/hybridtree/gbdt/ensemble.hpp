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

#ifndef HYBRIDTREE_GBDT_ENSEMBLE_HPP_
#define HYBRIDTREE_GBDT_ENSEMBLE_HPP_

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "hybridtree/data/bin_cuts.hpp"
#include "hybridtree/data/dataset.hpp"
#include "hybridtree/gbdt/loss.hpp"
#include "hybridtree/gbdt/tree.hpp"

namespace hybridtree {

struct TrainParams {
  std::size_t n_trees = 50;
  // Layers per tree, inclusive of the leaf layer.
  std::size_t max_depth = 7;
  double lambda = 1.0;
  double learning_rate = 0.1;
  std::size_t max_bins = 32;
  LossKind loss = LossKind::kLogistic;

  // Throws ConfigError on out-of-range values.
  void validate() const;
};

struct Ensemble {
  LossKind loss = LossKind::kLogistic;
  double learning_rate = 0.1;
  double base_score = 0;
  std::vector<Tree> trees;

  // base_score + sum_t learning_rate * tree_t(x), accumulated tree by tree.
  template <typename Lookup>
  double predict_raw(const Lookup& x) const {
    double s = base_score;
    for (const Tree& t : trees) s += learning_rate * t.predict(x);
    return s;
  }
  std::vector<double> predict_raw(const Dataset& data) const;
  // Sigmoid of the raw score for logistic loss, the raw score otherwise.
  std::vector<double> predict(const Dataset& data) const;
  std::set<FeatureId> features_used() const;

  // {loss, learning_rate, base_score, trees}; doubles round-trip exactly.
  nlohmann::json to_json() const;
  static Ensemble from_json(const nlohmann::json& j);

  bool operator==(const Ensemble&) const = default;
};

// Raw scores to model outputs for `loss`.
std::vector<double> to_output(std::vector<double> raw, LossKind loss);

using RoundObserver = std::function<void(
    std::size_t round, const Tree& tree, std::span<const double> y_p)>;

// Boosting from y_p = 0: per round, gradients, one tree of depth max_depth,
// then y_p += learning_rate * leaf value. Candidates come from
// compute_split_candidates(data, all features, max_bins) unless given.
Ensemble train_ensemble(const Dataset& data, const TrainParams& params,
                        const RoundObserver& observer = {});
Ensemble train_ensemble(const Dataset& data, const BinCuts& cuts,
                        const TrainParams& params,
                        const RoundObserver& observer = {});

}  // namespace hybridtree

#endif  // HYBRIDTREE_GBDT_ENSEMBLE_HPP_
