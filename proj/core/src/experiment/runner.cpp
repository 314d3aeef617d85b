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

#include "hybridtree/experiment/runner.hpp"

#include <algorithm>
#include <chrono>
#include <set>
#include <utility>

#include "hybridtree/common/error.hpp"
#include "hybridtree/federation/baselines.hpp"

namespace hybridtree {
namespace {

constexpr unsigned kDefaultPaillierBits = 1024;

std::vector<FeatureId> guest_feature_union(std::span<const Dataset> guests) {
  std::set<FeatureId> ids;
  for (const Dataset& g : guests) {
    ids.insert(g.feature_ids().begin(), g.feature_ids().end());
  }
  return {ids.begin(), ids.end()};
}

HybridPartition with_guests(HybridPartition base, PoolPartition pool) {
  base.guests = std::move(pool.guests);
  base.manifest.scheme = pool.manifest.scheme;
  base.manifest.guests = std::move(pool.manifest.guests);
  for (auto& [key, value] : pool.manifest.params.items()) {
    base.manifest.params[key] = value;
  }
  return base;
}

}  // namespace

std::string to_string(Method method) {
  switch (method) {
    case Method::kAllIn: return "allin";
    case Method::kSolo: return "solo";
    case Method::kHybridTree: return "hybridtree";
    case Method::kTfl: return "tfl";
    case Method::kMultiHost: return "multihost";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  for (Method m : {Method::kAllIn, Method::kSolo, Method::kHybridTree,
                   Method::kTfl, Method::kMultiHost}) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("unknown method '" + name + "'");
}

HybridPartition make_partition(const Dataset& data, const PartitionSpec& spec) {
  if (spec.guests == 0) throw ConfigError("at least one guest is required");
  HybridPartition base = partition_random_hybrid(
      data, {.n_guests = spec.guests,
             .seed = spec.seed,
             .guest_features = spec.guest_features});
  switch (spec.scheme) {
    case PartitionScheme::kRandomHybrid:
      return base;
    case PartitionScheme::kDirichlet: {
      const std::vector<FeatureId> pool_features = guest_feature_union(base.guests);
      const Dataset pool = data.select_features(pool_features).without_labels();
      PoolPartition pp = partition_dirichlet(pool, data.labels(), spec.guests,
                                             spec.beta, spec.seed + 1);
      return with_guests(std::move(base), std::move(pp));
    }
    case PartitionScheme::kOverlapHetero: {
      if (spec.guests < 2) {
        throw ConfigError("overlap_hetero needs at least two guests");
      }
      PoolPartition pp = partition_overlap_hetero(base.guests, spec.seed + 1);
      return with_guests(std::move(base), std::move(pp));
    }
  }
  throw ConfigError("unknown partition scheme");
}

std::shared_ptr<const Cipher> parse_cipher(const std::string& spec,
                                           std::optional<std::uint64_t> key_seed) {
  if (spec == "passthrough") return make_cipher("passthrough", 0);
  const std::string prefix = "paillier";
  if (spec.rfind(prefix, 0) != 0) {
    throw ConfigError("unknown cipher '" + spec + "'");
  }
  unsigned bits = kDefaultPaillierBits;
  if (spec.size() > prefix.size()) {
    if (spec[prefix.size()] != ':') {
      throw ConfigError("unknown cipher '" + spec + "'");
    }
    try {
      std::size_t used = 0;
      const std::string tail = spec.substr(prefix.size() + 1);
      bits = static_cast<unsigned>(std::stoul(tail, &used));
      if (used != tail.size()) throw ConfigError("");
    } catch (const std::exception&) {
      throw ConfigError("bad Paillier key size in '" + spec + "'");
    }
  }
  try {
    return make_cipher("paillier", bits, key_seed);
  } catch (const CryptoError& e) {
    throw ConfigError(e.what());
  }
}

nlohmann::json RunStats::to_json() const {
  return {{"train_seconds", train_seconds},
          {"host_cpu_seconds", host_cpu_seconds},
          {"guest_cpu_seconds", guest_cpu_seconds},
          {"messages", comm.messages},
          {"bytes", comm.bytes},
          {"phases_per_round", phases_per_round},
          {"rounds", rounds},
          {"warnings", warnings}};
}

nlohmann::json TrainedModel::to_json() const {
  nlohmann::json j{{"method", to_string(method)}, {"manifest", manifest.to_json()}};
  if (ensemble) j["ensemble"] = ensemble->to_json();
  nlohmann::json fed = nlohmann::json::array();
  for (const DistributedModel& m : federated) fed.push_back(m.to_json());
  j["federated"] = std::move(fed);
  return j;
}

TrainedModel TrainedModel::from_json(const nlohmann::json& j) {
  TrainedModel m;
  try {
    m.method = parse_method(j.at("method").get<std::string>());
    m.manifest = PartitionManifest::from_json(j.at("manifest"));
    if (j.contains("ensemble")) m.ensemble = Ensemble::from_json(j.at("ensemble"));
    for (const auto& f : j.at("federated")) {
      m.federated.push_back(DistributedModel::from_json(f));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed model file: ") + e.what());
  }
  const bool federated =
      m.method == Method::kHybridTree || m.method == Method::kMultiHost;
  if (federated ? m.federated.empty() : !m.ensemble) {
    throw ValidationError("model file lacks the trained model of method " +
                          to_string(m.method));
  }
  return m;
}

TrainedModel train_method(const HybridPartition& partition, const RunSpec& spec,
                          RunStats* stats) {
  RunStats local;
  RunStats& st = stats ? *stats : local;
  st = RunStats{};
  TrainedModel out;
  out.method = spec.method;
  out.manifest = partition.manifest;

  const auto start = std::chrono::steady_clock::now();
  auto options = [&]() {
    FederationOptions o;
    o.cipher = spec.cipher;
    o.execution = spec.execution;
    o.ledger = std::make_shared<CommLedger>();
    o.warn = [&st](const std::string& w) { st.warnings.push_back(w); };
    return o;
  };
  auto account = [&](const CommLedger& ledger) {
    const LedgerTotals t = ledger.totals();
    st.comm.messages += t.messages;
    st.comm.bytes += t.bytes;
    const std::size_t p = ledger.phases({ContextKind::kTraining, 0});
    st.phases_per_round = std::max(st.phases_per_round, p);
  };
  auto account_times = [&](const PartyTimes& t) {
    st.host_cpu_seconds += t.host;
    for (double g : t.guests) st.guest_cpu_seconds += g;
  };

  switch (spec.method) {
    case Method::kAllIn:
      out.ensemble = allin_train(partition.host, partition.guests, spec.params.train);
      break;
    case Method::kSolo:
      out.ensemble = solo_train(partition.host, spec.params.train);
      break;
    case Method::kTfl:
      out.ensemble = tfl_train(partition.host, partition.guests, spec.params.train);
      break;
    case Method::kHybridTree: {
      Federation fed(partition.host, partition.guests, spec.params, options());
      out.federated.push_back(fed.train());
      account(fed.ledger());
      account_times(fed.times());
      break;
    }
    case Method::kMultiHost: {
      if (spec.hosts == 0) throw ConfigError("at least one host is required");
      const std::vector<Dataset> hosts =
          split_instances(partition.host, spec.hosts, spec.seed + 2);
      for (const Dataset& h : hosts) {
        Federation fed(h, partition.guests, spec.params, options());
        out.federated.push_back(fed.train());
        account(fed.ledger());
        account_times(fed.times());
      }
      out.manifest.params["hosts"] = spec.hosts;
      break;
    }
  }
  st.train_seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start).count();
  st.rounds = spec.params.train.n_trees;
  return out;
}

std::vector<double> predict_method(const TrainedModel& model, const Dataset& test,
                                   std::uint64_t split_seed, Execution execution) {
  if (test.empty()) return {};
  switch (model.method) {
    case Method::kAllIn:
    case Method::kSolo:
    case Method::kTfl:
      return model.ensemble->predict(test);
    case Method::kHybridTree:
    case Method::kMultiHost: {
      const HybridPartition split = partition_like(model.manifest, test, split_seed);
      PredictOptions o;
      o.execution = execution;
      if (model.method == Method::kHybridTree) {
        return hybridtree_predict(model.federated.front(), split.host, split.guests, o);
      }
      return bagging_predict(model.federated, split.host, split.guests, o);
    }
  }
  throw ConfigError("unknown method");
}

}  // namespace hybridtree
