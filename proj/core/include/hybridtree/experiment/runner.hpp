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

#ifndef HYBRIDTREE_EXPERIMENT_RUNNER_HPP_
#define HYBRIDTREE_EXPERIMENT_RUNNER_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hybridtree/crypto/cipher.hpp"
#include "hybridtree/data/partition.hpp"
#include "hybridtree/federation/model.hpp"
#include "hybridtree/federation/protocol.hpp"
#include "hybridtree/gbdt/ensemble.hpp"

namespace hybridtree {

enum class Method { kAllIn, kSolo, kHybridTree, kTfl, kMultiHost };

std::string to_string(Method method);
Method parse_method(const std::string& name);

struct PartitionSpec {
  PartitionScheme scheme = PartitionScheme::kRandomHybrid;
  std::size_t guests = 5;
  std::uint64_t seed = 0;
  GuestFeatureMode guest_features = GuestFeatureMode::kShared;
  // Dirichlet concentration.
  double beta = 0.5;
};

// random_hybrid as is; dirichlet regroups the random_hybrid guest rows by
// label skew over the pooled guest features; overlap_hetero perturbs the
// random_hybrid guests. Host slice and labels come from random_hybrid.
HybridPartition make_partition(const Dataset& data, const PartitionSpec& spec);

// "passthrough", "paillier" (1024 bits) or "paillier:<bits>". A key seed
// makes Paillier keys reproducible. Throws ConfigError.
std::shared_ptr<const Cipher> parse_cipher(const std::string& spec,
                                           std::optional<std::uint64_t> key_seed = {});

struct RunSpec {
  Method method = Method::kHybridTree;
  HybridParams params;
  std::shared_ptr<const Cipher> cipher;
  Execution execution = Execution::kSequential;
  // Host shards for the multi-host method.
  std::size_t hosts = 5;
  std::uint64_t seed = 0;
};

struct RunStats {
  double train_seconds = 0;
  double host_cpu_seconds = 0;
  double guest_cpu_seconds = 0;
  LedgerTotals comm;
  // Ledger phases of the first training round (0 without federation).
  std::size_t phases_per_round = 0;
  std::size_t rounds = 0;
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
};

// A trained model of any method together with the partition it came from.
struct TrainedModel {
  Method method = Method::kHybridTree;
  PartitionManifest manifest;
  // allin, solo, tfl.
  std::optional<Ensemble> ensemble;
  // One model for hybridtree, one per host shard for multihost.
  std::vector<DistributedModel> federated;

  nlohmann::json to_json() const;
  static TrainedModel from_json(const nlohmann::json& j);
};

TrainedModel train_method(const HybridPartition& partition, const RunSpec& spec,
                          RunStats* stats = nullptr);

// Model outputs (probabilities, class votes for multihost, or regression
// values) on a held-out dataset carrying every feature. Federated methods
// split it like the training manifest with `split_seed`.
std::vector<double> predict_method(const TrainedModel& model, const Dataset& test,
                                   std::uint64_t split_seed,
                                   Execution execution = Execution::kSequential);

}  // namespace hybridtree

#endif  // HYBRIDTREE_EXPERIMENT_RUNNER_HPP_
