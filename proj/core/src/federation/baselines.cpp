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

#include "hybridtree/federation/baselines.hpp"

#include <numeric>

#include "hybridtree/common/error.hpp"
#include "hybridtree/data/bin_cuts.hpp"
#include "hybridtree/gbdt/binned.hpp"
#include "hybridtree/gbdt/loss.hpp"
#include "hybridtree/gbdt/trainer.hpp"

namespace hybridtree {

Ensemble solo_train(const Dataset& host, const TrainParams& params) {
  return train_ensemble(host, params);
}

Ensemble allin_train(const Dataset& host, std::span<const Dataset> guests,
                     const TrainParams& params) {
  return train_ensemble(merge_parties(host, guests), params);
}

Ensemble tfl_train(const Dataset& host, std::span<const Dataset> guests,
                   const TrainParams& params, const RoundObserver& observer) {
  params.validate();
  const Dataset merged = merge_parties(host, guests);
  const auto labels = host.labels();
  check_labels(labels, params.loss);

  struct Party {
    Dataset data;
    // Row in `host` (and `merged`) of every local row.
    std::vector<std::size_t> host_rows;
  };
  std::vector<Party> parties;
  {
    std::vector<std::size_t> rows(host.num_instances());
    std::iota(rows.begin(), rows.end(), 0);
    parties.push_back({host, rows});
  }
  for (const Dataset& g : guests) {
    std::vector<std::size_t> local;
    std::vector<std::size_t> host_rows;
    std::vector<double> y;
    for (std::size_t r = 0; r < g.num_instances(); ++r) {
      if (auto h = host.row_of(g.instance_ids()[r])) {
        local.push_back(r);
        host_rows.push_back(*h);
        y.push_back(labels[*h]);
      }
    }
    if (local.empty()) continue;
    parties.push_back(
        {g.select_rows(local).without_labels().with_labels(std::move(y)),
         std::move(host_rows)});
  }

  std::vector<BinnedMatrix> matrices;
  for (const Party& p : parties) {
    matrices.emplace_back(p.data, compute_split_candidates(p.data, {}, params.max_bins));
  }
  const ColumnLookup columns(
      merged, std::set<FeatureId>(merged.feature_ids().begin(),
                                  merged.feature_ids().end()));

  Ensemble e;
  e.loss = params.loss;
  e.learning_rate = params.learning_rate;
  std::vector<double> y_p(host.num_instances(), 0.0);
  for (std::size_t t = 0; t < params.n_trees; ++t) {
    const Party& p = parties[t % parties.size()];
    std::vector<double> local_yp;
    for (std::size_t h : p.host_rows) local_yp.push_back(y_p[h]);
    const auto g = compute_gradients(p.data.labels(), local_yp, params.loss);
    std::vector<std::size_t> rows(p.data.num_instances());
    std::iota(rows.begin(), rows.end(), 0);
    Tree tree = train_tree(matrices[t % parties.size()], rows, g,
                           params.max_depth, params.lambda)
                    .tree;
    for (std::size_t r = 0; r < y_p.size(); ++r) {
      y_p[r] += params.learning_rate * tree.predict(columns.row(r));
    }
    if (observer) observer(t, tree, y_p);
    e.trees.push_back(std::move(tree));
  }
  return e;
}

std::vector<DistributedModel> multi_host_train(std::span<const Dataset> hosts,
                                               std::span<const Dataset> guests,
                                               const HybridParams& params,
                                               const FederationOptions& options) {
  if (hosts.empty()) throw ValidationError("multi-host training needs a host");
  std::vector<DistributedModel> models;
  for (const Dataset& h : hosts) {
    models.push_back(hybridtree_train(h, guests, params, options));
  }
  return models;
}

std::vector<double> bagging_combine(std::span<const std::vector<double>> outputs,
                                    LossKind loss) {
  if (outputs.empty()) throw ValidationError("bagging needs at least one model");
  const std::size_t n = outputs[0].size();
  for (const auto& o : outputs) {
    if (o.size() != n) throw ValidationError("model outputs differ in length");
  }
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (loss == LossKind::kSquaredError) {
      double s = 0;
      for (const auto& o : outputs) s += o[i];
      out[i] = s / static_cast<double>(outputs.size());
    } else {
      std::size_t votes = 0;
      for (const auto& o : outputs) votes += o[i] >= 0.5;
      out[i] = 2 * votes > outputs.size() ? 1.0 : 0.0;
    }
  }
  return out;
}

std::vector<double> bagging_predict(std::span<const DistributedModel> models,
                                    const Dataset& host,
                                    std::span<const Dataset> guests,
                                    const PredictOptions& options) {
  if (models.empty()) throw ValidationError("bagging needs at least one model");
  std::vector<std::vector<double>> outputs;
  for (const DistributedModel& m : models) {
    outputs.push_back(hybridtree_predict(m, host, guests, options));
  }
  return bagging_combine(outputs, models[0].loss);
}

}  // namespace hybridtree
