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

#include "hybridtree/gbdt/ensemble.hpp"

#include <numeric>
#include <string>

#include "hybridtree/common/error.hpp"
#include "hybridtree/gbdt/binned.hpp"
#include "hybridtree/gbdt/trainer.hpp"

namespace hybridtree {

void TrainParams::validate() const {
  if (max_depth < 1) throw ConfigError("max_depth must be at least 1");
  if (!(lambda >= 0)) throw ConfigError("lambda must be non-negative");
  if (!(learning_rate > 0 && learning_rate <= 1)) {
    throw ConfigError("learning_rate must be in (0, 1]");
  }
  if (max_bins < 1) throw ConfigError("max_bins must be at least 1");
}

std::vector<double> Ensemble::predict_raw(const Dataset& data) const {
  ColumnLookup lookup(data, features_used());
  std::vector<double> out(data.num_instances());
  for (std::size_t r = 0; r < out.size(); ++r) {
    out[r] = predict_raw(lookup.row(r));
  }
  return out;
}

std::vector<double> Ensemble::predict(const Dataset& data) const {
  return to_output(predict_raw(data), loss);
}

std::set<FeatureId> Ensemble::features_used() const {
  std::set<FeatureId> out;
  for (const Tree& t : trees) {
    auto f = t.features_used();
    out.insert(f.begin(), f.end());
  }
  return out;
}

nlohmann::json Ensemble::to_json() const {
  nlohmann::json trees_json = nlohmann::json::array();
  for (const Tree& t : trees) trees_json.push_back(t.to_json());
  return {{"loss", to_string(loss)},
          {"learning_rate", learning_rate},
          {"base_score", base_score},
          {"trees", std::move(trees_json)}};
}

Ensemble Ensemble::from_json(const nlohmann::json& j) {
  Ensemble e;
  try {
    e.loss = parse_loss(j.at("loss").get<std::string>());
    e.learning_rate = j.at("learning_rate").get<double>();
    e.base_score = j.at("base_score").get<double>();
    for (const auto& t : j.at("trees")) e.trees.push_back(Tree::from_json(t));
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("malformed ensemble: ") + ex.what(), 0);
  }
  return e;
}

std::vector<double> to_output(std::vector<double> raw, LossKind loss) {
  if (loss == LossKind::kLogistic) {
    for (double& v : raw) v = sigmoid(v);
  }
  return raw;
}

Ensemble train_ensemble(const Dataset& data, const TrainParams& params,
                        const RoundObserver& observer) {
  params.validate();
  if (params.n_trees == 0) {
    return {params.loss, params.learning_rate, 0.0, {}};
  }
  BinCuts cuts = compute_split_candidates(data, {}, params.max_bins);
  return train_ensemble(data, cuts, params, observer);
}

Ensemble train_ensemble(const Dataset& data, const BinCuts& cuts,
                        const TrainParams& params,
                        const RoundObserver& observer) {
  params.validate();
  Ensemble model{params.loss, params.learning_rate, 0.0, {}};
  if (params.n_trees == 0) return model;
  auto labels = data.labels();
  check_labels(labels, params.loss);
  if (data.empty()) throw ValidationError("cannot train on an empty dataset");

  BinnedMatrix x(data, cuts);
  std::vector<std::size_t> rows(data.num_instances());
  std::iota(rows.begin(), rows.end(), 0);
  std::vector<double> y_p(data.num_instances(), model.base_score);
  for (std::size_t t = 0; t < params.n_trees; ++t) {
    auto g = compute_gradients(labels, y_p, params.loss);
    TrainedTree trained = train_tree(x, rows, g, params.max_depth, params.lambda);
    for (const auto& leaf : trained.leaves) {
      const double v = trained.tree.node(leaf.node_id).value;
      for (std::size_t r : leaf.rows) y_p[r] += params.learning_rate * v;
    }
    model.trees.push_back(std::move(trained.tree));
    if (observer) observer(t, model.trees.back(), y_p);
  }
  return model;
}

}  // namespace hybridtree
