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

#ifndef HYBRIDTREE_FEDERATION_BASELINES_HPP_
#define HYBRIDTREE_FEDERATION_BASELINES_HPP_

#include <span>
#include <vector>

#include "hybridtree/data/dataset.hpp"
#include "hybridtree/federation/model.hpp"
#include "hybridtree/federation/protocol.hpp"
#include "hybridtree/gbdt/ensemble.hpp"

namespace hybridtree {

// The host alone on its own features.
Ensemble solo_train(const Dataset& host, const TrainParams& params);

// Centralized training on the host's rows with every party's features.
Ensemble allin_train(const Dataset& host, std::span<const Dataset> guests,
                     const TrainParams& params);

// Tree-level baseline with labels granted to every party: round-robin over
// the host and then each guest sharing instances with it, party t mod P
// trains tree t on its own rows and features against the shared residuals.
// Predictions need the merged feature view (merge_parties). Leaks labels to
// guests by design.
Ensemble tfl_train(const Dataset& host, std::span<const Dataset> guests,
                   const TrainParams& params,
                   const RoundObserver& observer = {});

// One HybridTree model per host; every host federates with the guests
// holding its instances.
std::vector<DistributedModel> multi_host_train(std::span<const Dataset> hosts,
                                               std::span<const Dataset> guests,
                                               const HybridParams& params,
                                               const FederationOptions& options);

// Combines per-model outputs (probabilities for logistic): the mean for
// squared error, a majority vote over p >= 0.5 for logistic with ties going
// to class 0. Returns class labels in {0, 1} for logistic.
std::vector<double> bagging_combine(
    std::span<const std::vector<double>> outputs, LossKind loss);

std::vector<double> bagging_predict(std::span<const DistributedModel> models,
                                    const Dataset& host,
                                    std::span<const Dataset> guests,
                                    const PredictOptions& options = {});

}  // namespace hybridtree

#endif  // HYBRIDTREE_FEDERATION_BASELINES_HPP_
