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

#include "hybridtree/data/partition.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <unordered_set>
#include <utility>

#include "hybridtree/common/error.hpp"

namespace hybridtree {
namespace {

// Splits [0, n) into k near-equal groups after a seeded shuffle; each group
// is returned in ascending order.
std::vector<std::vector<std::size_t>> random_groups(std::size_t n,
                                                    std::size_t k, Rng& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<std::size_t>> groups(k);
  const std::size_t base = n / k;
  const std::size_t extra = n % k;
  std::size_t pos = 0;
  for (std::size_t g = 0; g < k; ++g) {
    std::size_t len = base + (g < extra ? 1 : 0);
    groups[g].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                     order.begin() + static_cast<std::ptrdiff_t>(pos + len));
    std::sort(groups[g].begin(), groups[g].end());
    pos += len;
  }
  return groups;
}

std::vector<FeatureId> features_in_column_order(
    const Dataset& data, const std::vector<std::size_t>& cols) {
  std::vector<std::size_t> sorted = cols;
  std::sort(sorted.begin(), sorted.end());
  std::vector<FeatureId> out;
  out.reserve(sorted.size());
  for (std::size_t c : sorted) out.push_back(data.feature_ids()[c]);
  return out;
}

PartySlice slice_of(const Dataset& d) {
  return {std::vector<InstanceId>(d.instance_ids().begin(),
                                  d.instance_ids().end()),
          std::vector<FeatureId>(d.feature_ids().begin(),
                                 d.feature_ids().end())};
}

std::vector<std::size_t> rows_for(const Dataset& data,
                                  std::span<const InstanceId> ids) {
  std::vector<std::size_t> rows;
  rows.reserve(ids.size());
  for (InstanceId id : ids) {
    auto r = data.row_of(id);
    if (!r) {
      throw ValidationError("source dataset has no instance " +
                            std::to_string(id));
    }
    rows.push_back(*r);
  }
  return rows;
}

}  // namespace

std::string to_string(PartitionScheme scheme) {
  switch (scheme) {
    case PartitionScheme::kRandomHybrid:
      return "random_hybrid";
    case PartitionScheme::kDirichlet:
      return "dirichlet";
    case PartitionScheme::kOverlapHetero:
      return "overlap_hetero";
  }
  return "unknown";
}

PartitionScheme parse_partition_scheme(const std::string& name) {
  if (name == "random_hybrid") return PartitionScheme::kRandomHybrid;
  if (name == "dirichlet") return PartitionScheme::kDirichlet;
  if (name == "overlap_hetero") return PartitionScheme::kOverlapHetero;
  throw ConfigError("unknown partition scheme \"" + name + "\"");
}

void PartitionManifest::validate() const {
  std::unordered_set<FeatureId> host_features(host.feature_ids.begin(),
                                              host.feature_ids.end());
  std::unordered_set<InstanceId> host_ids(host.instance_ids.begin(),
                                          host.instance_ids.end());
  for (std::size_t g = 0; g < guests.size(); ++g) {
    for (FeatureId f : guests[g].feature_ids) {
      if (host_features.count(f)) {
        throw ValidationError("guest " + std::to_string(g) +
                              " shares feature " + std::to_string(f) +
                              " with the host");
      }
    }
    if (host.instance_ids.empty()) continue;
    for (InstanceId id : guests[g].instance_ids) {
      if (!host_ids.count(id)) {
        throw ValidationError("guest " + std::to_string(g) +
                              " holds instance " + std::to_string(id) +
                              " unknown to the host");
      }
    }
  }
}

nlohmann::json PartitionManifest::to_json() const {
  nlohmann::json j;
  j["scheme"] = to_string(scheme);
  j["seed"] = seed;
  j["host"] = {{"instance_ids", host.instance_ids},
               {"feature_ids", host.feature_ids}};
  nlohmann::json gs = nlohmann::json::array();
  for (std::size_t g = 0; g < guests.size(); ++g) {
    gs.push_back({{"id", g},
                  {"instance_ids", guests[g].instance_ids},
                  {"feature_ids", guests[g].feature_ids}});
  }
  j["guests"] = std::move(gs);
  j["params"] = params;
  return j;
}

PartitionManifest PartitionManifest::from_json(const nlohmann::json& j) {
  PartitionManifest m;
  try {
    m.scheme = parse_partition_scheme(j.at("scheme").get<std::string>());
    m.seed = j.at("seed").get<std::uint64_t>();
    m.host.instance_ids =
        j.at("host").at("instance_ids").get<std::vector<InstanceId>>();
    m.host.feature_ids =
        j.at("host").at("feature_ids").get<std::vector<FeatureId>>();
    const auto& gs = j.at("guests");
    m.guests.resize(gs.size());
    for (const auto& g : gs) {
      auto id = g.at("id").get<std::size_t>();
      if (id >= m.guests.size()) {
        throw ValidationError("guest id " + std::to_string(id) +
                              " out of range");
      }
      m.guests[id].instance_ids =
          g.at("instance_ids").get<std::vector<InstanceId>>();
      m.guests[id].feature_ids =
          g.at("feature_ids").get<std::vector<FeatureId>>();
    }
    if (j.contains("params")) m.params = j.at("params");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed manifest: ") + e.what(), 0);
  }
  m.validate();
  return m;
}

std::string PartitionManifest::dump() const { return to_json().dump(1); }

HybridPartition partition_random_hybrid(const Dataset& data,
                                        const RandomHybridOptions& options) {
  const std::size_t k = options.n_guests;
  const std::size_t d = data.num_features();
  if (k < 1) throw ConfigError("n_guests must be at least 1");
  if (!data.has_labels()) {
    throw ValidationError("random hybrid partitioning needs a labeled dataset");
  }
  if (d < k + 1) {
    throw ValidationError("need at least " + std::to_string(k + 1) +
                          " features for 1 host and " + std::to_string(k) +
                          " guests, dataset has " + std::to_string(d));
  }

  Rng rng(options.seed);
  std::uniform_int_distribution<std::size_t> host_count_dist(1, d - k);
  const std::size_t host_count = host_count_dist(rng);
  std::vector<std::size_t> cols(d);
  std::iota(cols.begin(), cols.end(), 0);
  std::shuffle(cols.begin(), cols.end(), rng);

  std::vector<std::size_t> host_cols(cols.begin(), cols.begin() + host_count);
  std::vector<std::size_t> rest(cols.begin() + host_count, cols.end());
  std::vector<std::vector<std::size_t>> guest_cols(k);
  if (options.guest_features == GuestFeatureMode::kShared) {
    for (auto& gc : guest_cols) gc = rest;
  } else {
    auto groups = random_groups(rest.size(), k, rng);
    for (std::size_t g = 0; g < k; ++g) {
      for (std::size_t pos : groups[g]) guest_cols[g].push_back(rest[pos]);
    }
  }
  auto row_groups = random_groups(data.num_instances(), k, rng);

  HybridPartition out;
  const auto host_features = features_in_column_order(data, host_cols);
  out.host = data.select_features(host_features);
  out.manifest.scheme = PartitionScheme::kRandomHybrid;
  out.manifest.seed = options.seed;
  out.manifest.host = slice_of(out.host);
  for (std::size_t g = 0; g < k; ++g) {
    auto features = features_in_column_order(data, guest_cols[g]);
    Dataset guest =
        data.select_rows(row_groups[g]).select_features(features).without_labels();
    out.manifest.guests.push_back(slice_of(guest));
    out.guests.push_back(std::move(guest));
  }
  out.manifest.params = {
      {"n_guests", k},
      {"host_feature_count", host_count},
      {"guest_features",
       options.guest_features == GuestFeatureMode::kShared ? "shared"
                                                           : "split"}};
  return out;
}

PoolPartition partition_dirichlet(const Dataset& guest_pool,
                                  std::span<const double> labels,
                                  std::size_t n_guests, double beta,
                                  std::uint64_t seed) {
  if (n_guests < 1) throw ConfigError("n_guests must be at least 1");
  if (!(beta > 0)) throw ConfigError("dirichlet beta must be positive");
  if (labels.size() != guest_pool.num_instances()) {
    throw ValidationError("label vector does not match the guest pool");
  }

  Rng rng(seed);
  std::map<double, std::vector<std::size_t>> by_class;
  for (std::size_t r = 0; r < labels.size(); ++r) {
    by_class[labels[r]].push_back(r);
  }

  std::vector<std::vector<std::size_t>> assigned(n_guests);
  std::gamma_distribution<double> gamma(beta, 1.0);
  for (const auto& [cls, rows] : by_class) {
    std::vector<double> p(n_guests);
    double total = 0;
    for (double& v : p) {
      v = gamma(rng);
      total += v;
    }
    if (!(total > 0)) {
      // Every draw underflowed: the limit of Dir(beta -> 0) is a vertex.
      std::fill(p.begin(), p.end(), 0.0);
      p[std::uniform_int_distribution<std::size_t>(0, n_guests - 1)(rng)] = 1;
    }
    std::discrete_distribution<std::size_t> pick(p.begin(), p.end());
    for (std::size_t r : rows) assigned[pick(rng)].push_back(r);
  }

  PoolPartition out;
  out.manifest.scheme = PartitionScheme::kDirichlet;
  out.manifest.seed = seed;
  for (auto& rows : assigned) {
    std::sort(rows.begin(), rows.end());
    Dataset guest = guest_pool.select_rows(rows).without_labels();
    out.manifest.guests.push_back(slice_of(guest));
    out.guests.push_back(std::move(guest));
  }
  out.manifest.params = {{"n_guests", n_guests}, {"beta", beta}};
  return out;
}

PoolPartition partition_overlap_hetero(std::span<const Dataset> guests,
                                       std::uint64_t seed,
                                       const OverlapOverrides& overrides) {
  if (guests.size() < 2) {
    throw ConfigError("overlap/heterogeneous simulation needs at least 2 guests");
  }
  Rng rng(seed);
  std::size_t total_rows = 0;
  for (const auto& g : guests) total_rows += g.num_instances();

  // Instance id -> first guest holding it, over the original guests.
  std::map<InstanceId, std::size_t> owner;
  for (std::size_t g = 0; g < guests.size(); ++g) {
    for (InstanceId id : guests[g].instance_ids()) owner.emplace(id, g);
  }

  PoolPartition out;
  out.manifest.scheme = PartitionScheme::kOverlapHetero;
  out.manifest.seed = seed;
  nlohmann::json dropped = nlohmann::json::array();
  nlohmann::json duplicated = nlohmann::json::array();

  for (std::size_t g = 0; g < guests.size(); ++g) {
    const Dataset& mine = guests[g];
    const std::size_t d = mine.num_features();
    if (d == 0) throw ValidationError("guest " + std::to_string(g) +
                                      " has no features");
    const std::size_t alpha =
        overrides.dropped_features
            ? std::min(*overrides.dropped_features, d - 1)
            : std::uniform_int_distribution<std::size_t>(0, d - 1)(rng);
    const std::size_t beta =
        overrides.duplicated_instances
            ? *overrides.duplicated_instances
            : std::uniform_int_distribution<std::size_t>(0, total_rows / 20)(
                  rng);

    std::vector<InstanceId> foreign;
    for (const auto& [id, src] : owner) {
      if (!mine.row_of(id)) foreign.push_back(id);
    }
    std::shuffle(foreign.begin(), foreign.end(), rng);
    foreign.resize(std::min(beta, foreign.size()));
    std::sort(foreign.begin(), foreign.end());

    std::vector<InstanceId> ids(mine.instance_ids().begin(),
                                mine.instance_ids().end());
    std::vector<std::vector<double>> cols(d);
    for (std::size_t c = 0; c < d; ++c) {
      auto col = mine.column(c);
      cols[c].assign(col.begin(), col.end());
    }
    for (InstanceId id : foreign) {
      const Dataset& src = guests[owner.at(id)];
      const std::size_t row = *src.row_of(id);
      ids.push_back(id);
      for (std::size_t c = 0; c < d; ++c) {
        auto sc = src.column_of(mine.feature_ids()[c]);
        cols[c].push_back(sc ? src.value(row, *sc) : kMissing);
      }
    }
    Dataset grown(std::move(ids),
                  std::vector<FeatureId>(mine.feature_ids().begin(),
                                         mine.feature_ids().end()),
                  std::move(cols));

    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::size_t> keep(order.begin() + alpha, order.end());
    Dataset result =
        grown.select_features(features_in_column_order(grown, keep));

    dropped.push_back(alpha);
    duplicated.push_back(foreign.size());
    out.manifest.guests.push_back(slice_of(result));
    out.guests.push_back(std::move(result));
  }
  out.manifest.params = {{"dropped_features", dropped},
                         {"duplicated_instances", duplicated}};
  return out;
}

HybridPartition materialize(const PartitionManifest& manifest,
                            const Dataset& source) {
  manifest.validate();
  HybridPartition out;
  out.manifest = manifest;
  out.host = source.select_rows(rows_for(source, manifest.host.instance_ids))
                 .select_features(manifest.host.feature_ids);
  for (const auto& slice : manifest.guests) {
    out.guests.push_back(source.select_rows(rows_for(source, slice.instance_ids))
                             .select_features(slice.feature_ids)
                             .without_labels());
  }
  return out;
}

HybridPartition partition_like(const PartitionManifest& train_manifest,
                               const Dataset& data, std::uint64_t seed) {
  HybridPartition out;
  out.manifest.scheme = train_manifest.scheme;
  out.manifest.seed = seed;
  out.manifest.params = {{"like", train_manifest.params}};
  out.host = data.select_features(train_manifest.host.feature_ids);
  out.manifest.host = slice_of(out.host);
  const std::size_t k = train_manifest.guests.size();
  if (k == 0) return out;
  Rng rng(seed);
  auto groups = random_groups(data.num_instances(), k, rng);
  for (std::size_t g = 0; g < k; ++g) {
    Dataset guest = data.select_rows(groups[g])
                        .select_features(train_manifest.guests[g].feature_ids)
                        .without_labels();
    out.manifest.guests.push_back(slice_of(guest));
    out.guests.push_back(std::move(guest));
  }
  return out;
}

std::vector<Dataset> split_instances(const Dataset& data, std::size_t parts,
                                     std::uint64_t seed) {
  if (parts == 0) throw ValidationError("cannot split into zero parts");
  if (data.num_instances() < parts) {
    throw ValidationError("fewer instances than parts");
  }
  Rng rng(seed);
  std::vector<Dataset> out;
  for (const auto& rows : random_groups(data.num_instances(), parts, rng)) {
    out.push_back(data.select_rows(rows));
  }
  return out;
}

}  // namespace hybridtree
