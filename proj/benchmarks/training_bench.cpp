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

#include <numeric>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "hybridtree/common/types.hpp"
#include "hybridtree/data/bin_cuts.hpp"
#include "hybridtree/data/partition.hpp"
#include "hybridtree/federation/protocol.hpp"
#include "hybridtree/gbdt/binned.hpp"
#include "hybridtree/gbdt/ensemble.hpp"
#include "hybridtree/gbdt/loss.hpp"
#include "hybridtree/gbdt/trainer.hpp"

namespace {

using namespace hybridtree;

Dataset synthetic(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> z;
  std::vector<std::vector<double>> cols(d, std::vector<double>(n));
  std::vector<double> y(n);
  for (std::size_t r = 0; r < n; ++r) {
    double s = 0;
    for (std::size_t f = 0; f < d; ++f) {
      cols[f][r] = z(rng);
      if (f % 3 == 0) s += cols[f][r];
    }
    y[r] = s + z(rng) > 0 ? 1.0 : 0.0;
  }
  std::vector<InstanceId> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  std::vector<FeatureId> features(d);
  std::iota(features.begin(), features.end(), 0);
  return Dataset(ids, features, cols, y);
}

void BM_TrainTree(benchmark::State& state) {
  const Dataset data = synthetic(static_cast<std::size_t>(state.range(0)), 20, 1);
  const BinnedMatrix x(data, compute_split_candidates(data, {}, 32));
  const std::vector<double> g = compute_gradients(
      data.labels(), std::vector<double>(data.num_instances(), 0.0), LossKind::kLogistic);
  std::vector<std::size_t> rows(data.num_instances());
  std::iota(rows.begin(), rows.end(), 0);
  for (auto _ : state) benchmark::DoNotOptimize(train_tree(x, rows, g, 7, 1.0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TrainTree)->Arg(10000)->Arg(50000)->Unit(benchmark::kMillisecond);

void BM_PredictEnsemble(benchmark::State& state) {
  const Dataset data = synthetic(20000, 20, 2);
  TrainParams p;
  p.n_trees = 50;
  const Ensemble e = train_ensemble(data, p);
  for (auto _ : state) benchmark::DoNotOptimize(e.predict(data));
  state.SetItemsProcessed(state.iterations() * 20000);
}
BENCHMARK(BM_PredictEnsemble)->Unit(benchmark::kMillisecond);

// One boosting round of the federated protocol; range(0) = guests,
// range(1) = 0 for assisted, 1 for surrogate split finding.
void BM_FederatedRound(benchmark::State& state) {
  const Dataset data = synthetic(20000, 20, 3);
  const HybridPartition p = partition_random_hybrid(
      data, {.n_guests = static_cast<std::size_t>(state.range(0)), .seed = 3});
  HybridParams params;
  params.train.n_trees = 1;
  params.mode = state.range(1) ? GuestSplitMode::kSurrogate : GuestSplitMode::kAssisted;
  std::uint64_t bytes = 0;
  for (auto _ : state) {
    FederationOptions o;
    o.ledger = std::make_shared<CommLedger>();
    Federation fed(p.host, p.guests, params, o);
    benchmark::DoNotOptimize(fed.train());
    bytes = o.ledger->totals().bytes;
  }
  state.counters["comm_bytes"] = static_cast<double>(bytes);
}
BENCHMARK(BM_FederatedRound)
    ->Args({2, 0})->Args({5, 0})->Args({5, 1})->Args({10, 0})
    ->Unit(benchmark::kMillisecond);

}  // namespace
