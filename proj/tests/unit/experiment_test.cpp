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

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "hybridtree/common/error.hpp"
#include "hybridtree/common/types.hpp"
#include "hybridtree/experiment/runner.hpp"
#include "hybridtree/gbdt/metrics.hpp"

namespace hybridtree {
namespace {

Dataset synthetic(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> z;
  std::vector<std::vector<double>> cols(8, std::vector<double>(n));
  std::vector<double> y(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (auto& c : cols) c[r] = std::round(z(rng) * 4) / 4;
    y[r] = cols[0][r] + cols[5][r] + 0.3 * z(rng) > 0 ? 1.0 : 0.0;
  }
  std::vector<InstanceId> ids(n);
  std::iota(ids.begin(), ids.end(), 100);
  std::vector<FeatureId> f(8);
  std::iota(f.begin(), f.end(), 0);
  return Dataset(ids, f, cols, y);
}

RunSpec small_spec(Method method) {
  RunSpec s;
  s.method = method;
  s.params.train.n_trees = 3;
  s.params.train.max_depth = 4;
  s.params.host_depth = 2;
  s.params.guest_depth = 2;
  s.params.train.max_bins = 8;
  s.cipher = parse_cipher("passthrough");
  s.hosts = 2;
  return s;
}

TEST(Method, NamesRoundTrip) {
  for (Method m : {Method::kAllIn, Method::kSolo, Method::kHybridTree, Method::kTfl,
                   Method::kMultiHost}) {
    EXPECT_EQ(parse_method(to_string(m)), m);
  }
  EXPECT_THROW(parse_method("secureboost"), ConfigError);
}

TEST(Cipher, SpecParsing) {
  EXPECT_EQ(parse_cipher("passthrough")->kind(), CipherKind::kPassthrough);
  const auto p = std::dynamic_pointer_cast<const PaillierCipher>(parse_cipher("paillier:512", 3));
  ASSERT_NE(p, nullptr);
  EXPECT_EQ(p->key_bits(), 512u);
  for (const char* bad : {"paillier:", "paillier:12x", "paillier512", "rsa", "paillier:100"}) {
    EXPECT_THROW(parse_cipher(bad), ConfigError) << bad;
  }
}

TEST(Partition, SchemesKeepHostAndCoverInstances) {
  const Dataset d = synthetic(300, 1);
  for (PartitionScheme scheme : {PartitionScheme::kRandomHybrid, PartitionScheme::kDirichlet,
                                 PartitionScheme::kOverlapHetero}) {
    const HybridPartition p = make_partition(d, {.scheme = scheme, .guests = 3, .seed = 7});
    EXPECT_EQ(p.manifest.scheme, scheme);
    EXPECT_EQ(p.host.num_instances(), d.num_instances());
    ASSERT_EQ(p.guests.size(), 3u);
    std::set<InstanceId> covered;
    for (const Dataset& g : p.guests) {
      EXPECT_FALSE(g.has_labels());
      covered.insert(g.instance_ids().begin(), g.instance_ids().end());
      for (FeatureId f : g.feature_ids()) EXPECT_FALSE(p.host.has_feature(f));
    }
    if (scheme != PartitionScheme::kOverlapHetero) {
      EXPECT_EQ(covered.size(), d.num_instances());
    }
    p.manifest.validate();
    const HybridPartition again = make_partition(d, {.scheme = scheme, .guests = 3, .seed = 7});
    EXPECT_EQ(again.manifest.dump(), p.manifest.dump());
  }
  EXPECT_THROW(make_partition(d, {.guests = 0}), ConfigError);
  EXPECT_THROW(
      make_partition(d, {.scheme = PartitionScheme::kOverlapHetero, .guests = 1}),
      ConfigError);
}

TEST(TrainedModel, JsonRoundTripKeepsPredictions) {
  const Dataset d = synthetic(400, 2);
  const Dataset test = synthetic(120, 3);
  const HybridPartition p = make_partition(d, {.guests = 2, .seed = 4});
  for (Method m : {Method::kAllIn, Method::kSolo, Method::kHybridTree, Method::kTfl,
                   Method::kMultiHost}) {
    RunStats stats;
    const TrainedModel model = train_method(p, small_spec(m), &stats);
    const TrainedModel loaded = TrainedModel::from_json(model.to_json());
    EXPECT_EQ(loaded.method, m);
    EXPECT_EQ(loaded.to_json(), model.to_json());
    const auto a = predict_method(model, test, 9);
    const auto b = predict_method(loaded, test, 9);
    EXPECT_EQ(a, b) << to_string(m);
    EXPECT_EQ(a.size(), test.num_instances());
    EXPECT_TRUE(predict_method(model, Dataset(), 9).empty());
    const bool federated = m == Method::kHybridTree || m == Method::kMultiHost;
    EXPECT_EQ(stats.comm.bytes > 0, federated) << to_string(m);
    EXPECT_EQ(model.federated.size(), m == Method::kMultiHost ? 2u : federated ? 1u : 0u);
  }
}

TEST(TrainedModel, RejectsIncompleteFiles) {
  nlohmann::json j{{"method", "hybridtree"},
                   {"manifest", PartitionManifest{}.to_json()},
                   {"federated", nlohmann::json::array()}};
  EXPECT_THROW(TrainedModel::from_json(j), ValidationError);
  EXPECT_THROW(TrainedModel::from_json(nlohmann::json::object()), ValidationError);
}

TEST(RunStats, SurrogateRoundUsesTwoPhases) {
  const Dataset d = synthetic(300, 5);
  const HybridPartition p = make_partition(d, {.guests = 2, .seed = 6});
  RunSpec s = small_spec(Method::kHybridTree);
  s.params.mode = GuestSplitMode::kSurrogate;
  RunStats stats;
  train_method(p, s, &stats);
  EXPECT_EQ(stats.phases_per_round, 2u);
  s.params.mode = GuestSplitMode::kAssisted;
  train_method(p, s, &stats);
  EXPECT_EQ(stats.phases_per_round, 4u);
}

}  // namespace
}  // namespace hybridtree
