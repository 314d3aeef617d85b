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

#ifndef HYBRIDTREE_DATA_PARTITION_HPP_
#define HYBRIDTREE_DATA_PARTITION_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hybridtree/data/dataset.hpp"

namespace hybridtree {

enum class PartitionScheme { kRandomHybrid, kDirichlet, kOverlapHetero };

std::string to_string(PartitionScheme scheme);
PartitionScheme parse_partition_scheme(const std::string& name);

struct PartySlice {
  std::vector<InstanceId> instance_ids;
  std::vector<FeatureId> feature_ids;
};

// Declarative record of who owns which instances and features.
struct PartitionManifest {
  PartitionScheme scheme = PartitionScheme::kRandomHybrid;
  std::uint64_t seed = 0;
  PartySlice host;
  std::vector<PartySlice> guests;
  nlohmann::json params = nlohmann::json::object();

  // Guest instance ids must be host instance ids (when the host slice is
  // populated) and guest features must not overlap host features.
  void validate() const;

  nlohmann::json to_json() const;
  static PartitionManifest from_json(const nlohmann::json& j);
  // Pretty-printed JSON; byte-identical for equal manifests.
  std::string dump() const;
};

struct HybridPartition {
  Dataset host;
  std::vector<Dataset> guests;
  PartitionManifest manifest;
};

enum class GuestFeatureMode {
  // Every guest holds all non-host features for its own instances.
  kShared,
  // Non-host features are split into disjoint, near-equal guest subsets.
  kSplit,
};

struct RandomHybridOptions {
  std::size_t n_guests = 5;
  std::uint64_t seed = 0;
  GuestFeatureMode guest_features = GuestFeatureMode::kShared;
};

// Host keeps every instance and label with a uniformly sized random feature
// subset (size drawn from [1, d - n_guests]); instances are split randomly
// into n_guests near-equal disjoint groups, one per guest.
HybridPartition partition_random_hybrid(const Dataset& data,
                                        const RandomHybridOptions& options);

struct PoolPartition {
  std::vector<Dataset> guests;
  PartitionManifest manifest;
};

// Label-skewed regrouping of a pooled guest dataset: for each class k a
// proportion vector p_k ~ Dir(beta) is drawn, and every instance of class k
// goes to guest j with probability p_k[j]. Guests keep all pool features.
// `labels` is aligned with the pool's rows.
PoolPartition partition_dirichlet(const Dataset& guest_pool,
                                  std::span<const double> labels,
                                  std::size_t n_guests, double beta,
                                  std::uint64_t seed);

struct OverlapOverrides {
  std::optional<std::size_t> dropped_features;
  std::optional<std::size_t> duplicated_instances;
};

// Per guest, drops alpha ~ U[0, d_g - 1] features and copies
// beta ~ U[0, n / 20] instances held by other guests (n = total guest rows).
// Copied rows take values from the lowest-index source guest holding them,
// missing where the source lacks the feature. Requires >= 2 guests.
PoolPartition partition_overlap_hetero(std::span<const Dataset> guests,
                                       std::uint64_t seed,
                                       const OverlapOverrides& overrides = {});

// Rebuilds party datasets from a manifest and the dataset it was drawn from.
HybridPartition materialize(const PartitionManifest& manifest,
                            const Dataset& source);

// Splits a held-out dataset like `train_manifest`: the host gets every
// instance (with labels) on its features; instances are divided uniformly at
// random between guests, each on its manifest feature list.
HybridPartition partition_like(const PartitionManifest& train_manifest,
                               const Dataset& data, std::uint64_t seed);

// Disjoint near-equal random row groups, each keeping every feature and the
// labels; rows stay in source order within a group.
std::vector<Dataset> split_instances(const Dataset& data, std::size_t parts,
                                     std::uint64_t seed);

}  // namespace hybridtree

#endif  // HYBRIDTREE_DATA_PARTITION_HPP_
