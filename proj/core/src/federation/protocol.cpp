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

#include "hybridtree/federation/protocol.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <utility>

#include "hybridtree/common/error.hpp"
#include "hybridtree/data/bin_cuts.hpp"
#include "hybridtree/gbdt/binned.hpp"
#include "hybridtree/gbdt/loss.hpp"
#include "hybridtree/gbdt/trainer.hpp"
#include "parties.hpp"

namespace hybridtree {

using internal::GuestParty;
using internal::GuestRuntime;
using internal::thread_cpu_seconds;

namespace {

template <typename T>
T expect(Message m, const PartyId& from) {
  if (auto* v = std::get_if<T>(&m)) return std::move(*v);
  throw ProtocolError("unexpected " + to_string(kind_of(m)) + " from " +
                      to_string(from));
}

// Holding guests of every host row, ascending.
std::vector<std::vector<std::uint32_t>> link_holders(
    const Dataset& host, std::span<const Dataset> guests) {
  std::vector<std::vector<std::uint32_t>> holders(host.num_instances());
  for (std::size_t u = 0; u < guests.size(); ++u) {
    for (InstanceId id : guests[u].instance_ids()) {
      if (auto row = host.row_of(id)) {
        holders[*row].push_back(static_cast<std::uint32_t>(u));
      }
    }
  }
  return holders;
}

// Decrypts with a cache keyed by ciphertext, since every instance in one
// bottom leaf carries the same ciphertext.
class Decryptor {
 public:
  explicit Decryptor(const Cipher& cipher) : cipher_(&cipher) {}
  double operator()(const Ciphertext& c) {
    auto key = std::make_pair(c.scale, c.value);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    const double v = cipher_->decrypt_real(c);
    cache_.emplace(std::move(key), v);
    return v;
  }

 private:
  const Cipher* cipher_;
  std::map<std::pair<std::int16_t, mpz_class>, double> cache_;
};

// Accumulates the calling thread's CPU time, paused while waiting on
// guests.
class HostClock {
 public:
  explicit HostClock(double& total) : total_(&total), start_(thread_cpu_seconds()) {}
  ~HostClock() { pause(); }
  void pause() {
    if (running_) *total_ += thread_cpu_seconds() - start_;
    running_ = false;
  }
  void resume() {
    start_ = thread_cpu_seconds();
    running_ = true;
  }

 private:
  double* total_;
  double start_;
  bool running_ = true;
};

}  // namespace

std::string to_string(Execution execution) {
  return execution == Execution::kThreaded ? "threaded" : "sequential";
}

Execution parse_execution(const std::string& name) {
  if (name == "sequential") return Execution::kSequential;
  if (name == "threaded") return Execution::kThreaded;
  throw ConfigError("unknown execution mode \"" + name + "\"");
}

std::uint32_t assign_responsible_guest(std::span<const std::uint32_t> holders) {
  if (holders.empty()) throw ValidationError("instance has no holding guest");
  return *std::min_element(holders.begin(), holders.end());
}

struct Federation::Impl {
  HybridParams params;
  FederationOptions options;
  std::shared_ptr<const Cipher> cipher;
  std::shared_ptr<CommLedger> ledger;
  InProcessTransport transport;
  Dataset host;
  std::vector<Dataset> guest_data;
  std::vector<std::uint32_t> active;
  std::vector<std::unique_ptr<GuestParty>> guests;
  std::vector<std::vector<std::uint32_t>> holders;
  std::vector<std::string> warnings;
  std::unique_ptr<Endpoint> endpoint;
  std::unique_ptr<GuestRuntime> runtime;
  double host_cpu = 0;
  bool trained = false;

  void warn(const std::string& msg) {
    warnings.push_back(msg);
    if (options.warn) options.warn(msg);
  }

  Message await(std::uint32_t guest, HostClock& clock) {
    clock.pause();
    const PartyId from = PartyId::guest(guest);
    std::optional<Message> m;
    if (options.execution == Execution::kSequential) {
      runtime->pump();
      m = endpoint->try_receive(from);
      if (!m) {
        throw ProtocolError("guest " + std::to_string(guest) +
                            " stalled without replying");
      }
    } else {
      m = endpoint->receive(from);
    }
    clock.resume();
    return std::move(*m);
  }

  void setup(HostClock& clock);
  DistributedModel train();
};

Federation::Federation(const Dataset& host, std::span<const Dataset> guests,
                       const HybridParams& params, FederationOptions options)
    : impl_(std::make_unique<Impl>()) {
  Impl& s = *impl_;
  params.validate();
  if (!host.has_labels()) throw ValidationError("host dataset has no labels");
  check_labels(host.labels(), params.train.loss);
  s.params = params;
  s.options = std::move(options);
  s.cipher = s.options.cipher ? s.options.cipher
                              : std::make_shared<PassthroughCipher>();
  if (!s.cipher->can_decrypt()) {
    throw CryptoError("the host needs a private key");
  }
  s.ledger = s.options.ledger ? s.options.ledger : std::make_shared<CommLedger>();
  s.host = host;
  s.guest_data.assign(guests.begin(), guests.end());
  s.holders = link_holders(s.host, s.guest_data);

  std::vector<std::size_t> linked(guests.size(), 0);
  for (const auto& h : s.holders) {
    for (std::uint32_t u : h) ++linked[u];
  }
  for (std::uint32_t u = 0; u < guests.size(); ++u) {
    if (linked[u] == 0) {
      s.warn("guest " + std::to_string(u) +
             " shares no instance with the host and is excluded");
      continue;
    }
    s.active.push_back(u);
  }
  // Excluded guests never hold a slot.
  for (auto& h : s.holders) {
    std::erase_if(h, [&](std::uint32_t u) { return linked[u] == 0; });
  }

  s.endpoint = std::make_unique<Endpoint>(PartyId::host(), s.transport, *s.ledger);
  std::vector<GuestParty*> raw;
  for (std::uint32_t u : s.active) {
    internal::GuestConfig cfg;
    cfg.index = u;
    cfg.guest_depth = params.guest_depth;
    cfg.lambda = params.train.lambda;
    cfg.mode = params.mode;
    cfg.max_bins = params.train.max_bins;
    cfg.frac_bits = params.frac_bits;
    cfg.leaf_frac_bits = params.leaf_frac_bits;
    s.guests.push_back(std::make_unique<GuestParty>(s.guest_data[u], cfg,
                                                    s.transport, *s.ledger));
    raw.push_back(s.guests.back().get());
  }
  s.runtime = std::make_unique<GuestRuntime>(s.options.execution, s.transport,
                                             std::move(raw));
  HostClock clock(s.host_cpu);
  s.setup(clock);
}

Federation::~Federation() {
  if (impl_ && impl_->runtime) impl_->runtime->stop(*impl_->endpoint);
}

void Federation::Impl::setup(HostClock& clock) {
  const MessageContext ctx{ContextKind::kSetup, 0};
  PublicKeyAnnounce announce;
  announce.ctx = ctx;
  ByteWriter w;
  cipher->write_public_key(w);
  announce.key = w.release();
  for (std::uint32_t u : active) endpoint->send(PartyId::guest(u), announce);

  DhExchange roster;
  roster.ctx = ctx;
  for (std::uint32_t u : active) {
    auto m = expect<DhExchange>(await(u, clock), PartyId::guest(u));
    if (m.entries.size() != 1 || m.entries[0].guest != u) {
      throw ProtocolError("guest " + std::to_string(u) +
                          " sent a malformed DH announcement");
    }
    roster.entries.push_back(m.entries[0]);
  }
  for (std::uint32_t u : active) endpoint->send(PartyId::guest(u), roster);
  for (std::uint32_t u : active) {
    auto ack = expect<DhExchange>(await(u, clock), PartyId::guest(u));
    if (!ack.entries.empty()) {
      throw ProtocolError("guest " + std::to_string(u) +
                          " sent a malformed key acknowledgement");
    }
  }
}

DistributedModel Federation::Impl::train() {
  if (trained) throw ProtocolError("federation already trained");
  trained = true;
  HostClock clock(host_cpu);
  const TrainParams& tp = params.train;
  const std::size_t n = host.num_instances();
  const auto labels = host.labels();

  const BinCuts cuts = compute_split_candidates(host, {}, tp.max_bins);
  const BinnedMatrix matrix(host, cuts);
  std::vector<std::size_t> all_rows(n);
  std::iota(all_rows.begin(), all_rows.end(), 0);

  DistributedModel model;
  model.loss = tp.loss;
  model.learning_rate = tp.learning_rate;
  model.host_depth = params.host_depth;
  model.guest_depth = params.guest_depth;
  model.mode = params.mode;
  model.n_guests = static_cast<std::uint32_t>(guest_data.size());
  model.cipher = cipher;

  std::vector<double> y_p(n, 0.0);
  std::map<std::uint32_t, std::size_t> slot_of;
  for (std::size_t i = 0; i < active.size(); ++i) slot_of[active[i]] = i;

  for (std::size_t t = 0; t < tp.n_trees; ++t) {
    const MessageContext ctx{ContextKind::kTraining, t};
    const std::vector<double> g = compute_gradients(labels, y_p, tp.loss);
    TrainedTree top = train_tree(matrix, all_rows, g, params.host_depth + 1,
                                 tp.lambda);

    // Encrypt each gradient once, for its responsible guest.
    std::vector<std::optional<Ciphertext>> enc(n);
    std::uint32_t bound_bits = 1;
    for (std::size_t r = 0; r < n; ++r) {
      if (holders[r].empty()) continue;
      const mpz_class q = cipher->codec().encode_signed(g[r], params.frac_bits);
      bound_bits = std::max<std::uint32_t>(
          bound_bits, static_cast<std::uint32_t>(
                          mpz_sizeinbase(mpz_class(abs(q)).get_mpz_t(), 2)));
      enc[r] = cipher->encrypt(q, params.frac_bits);
    }

    // Shards, and the host row behind every shard position.
    std::vector<GradientShard> shards(active.size());
    std::vector<std::vector<std::vector<std::size_t>>> rows_of(active.size());
    for (auto& s : shards) {
      s.ctx = ctx;
      s.bound_bits = bound_bits;
    }
    for (const LeafPartition& leaf : top.leaves) {
      std::vector<std::pair<InstanceId, std::size_t>> members;
      for (std::size_t r : leaf.rows) {
        if (!holders[r].empty()) members.emplace_back(host.instance_ids()[r], r);
      }
      std::sort(members.begin(), members.end());
      std::vector<GradientShard::Node> nodes(active.size());
      std::vector<std::vector<std::size_t>> node_rows(active.size());
      for (auto& nd : nodes) nd.node = leaf.node_id;
      for (const auto& [id, r] : members) {
        const std::uint32_t owner = assign_responsible_guest(holders[r]);
        for (std::uint32_t u : holders[r]) {
          const std::size_t s = slot_of.at(u);
          GradientShard::Node& nd = nodes[s];
          if (holders[r].size() > 1) {
            nd.co_holders.push_back(
                {static_cast<std::uint32_t>(nd.instance_ids.size()), holders[r]});
          }
          nd.instance_ids.push_back(id);
          nd.responsible.push_back(u == owner);
          if (u == owner) nd.gradients.push_back(*enc[r]);
          node_rows[s].push_back(r);
        }
      }
      for (std::size_t s = 0; s < active.size(); ++s) {
        if (nodes[s].instance_ids.empty()) continue;
        shards[s].nodes.push_back(std::move(nodes[s]));
        rows_of[s].push_back(std::move(node_rows[s]));
      }
    }
    for (std::size_t s = 0; s < active.size(); ++s) {
      endpoint->send(PartyId::guest(active[s]), shards[s]);
    }

    if (params.mode == GuestSplitMode::kAssisted) {
      Decryptor decrypt(*cipher);
      for (std::uint32_t layer = 1; layer < params.guest_depth; ++layer) {
        for (std::uint32_t u : active) {
          const PartyId from = PartyId::guest(u);
          auto q = expect<SplitQuery>(await(u, clock), from);
          if (q.ctx != ctx || q.layer != layer) {
            throw ProtocolError("split query out of sequence from " +
                                to_string(from));
          }
          SplitReply reply;
          reply.ctx = ctx;
          reply.layer = layer;
          for (const auto& node : q.nodes) {
            const double total = decrypt(node.total);
            std::vector<CandidateStats> stats;
            stats.reserve(node.candidates.size());
            for (const auto& c : node.candidates) {
              stats.push_back({decrypt(c.sum_left), c.count_left});
            }
            auto choice = choose_split(stats, total, node.count, tp.lambda);
            reply.choices.push_back(
                choice ? static_cast<std::int32_t>(choice->index) : -1);
          }
          endpoint->send(from, reply);
        }
      }
    }

    // Aggregate the masked contributions per instance and decrypt.
    std::vector<std::optional<Ciphertext>> agg(n);
    for (std::size_t s = 0; s < active.size(); ++s) {
      const PartyId from = PartyId::guest(active[s]);
      auto c = expect<LeafContribution>(await(active[s], clock), from);
      if (c.ctx != ctx || c.nodes.size() != shards[s].nodes.size()) {
        throw ProtocolError("leaf contribution does not match the shard sent to " +
                            to_string(from));
      }
      for (std::size_t k = 0; k < c.nodes.size(); ++k) {
        const auto& rows = rows_of[s][k];
        if (c.nodes[k].node != shards[s].nodes[k].node ||
            c.nodes[k].values.size() != rows.size()) {
          throw ProtocolError("leaf contribution does not match the shard sent to " +
                              to_string(from));
        }
        for (std::size_t p = 0; p < rows.size(); ++p) {
          auto& a = agg[rows[p]];
          a = a ? cipher->add(*a, c.nodes[k].values[p]) : c.nodes[k].values[p];
        }
      }
    }
    Decryptor decrypt(*cipher);
    std::vector<double> fallback(n);
    for (const LeafPartition& leaf : top.leaves) {
      const double v = top.tree.node(leaf.node_id).value;
      for (std::size_t r : leaf.rows) fallback[r] = v;
    }
    for (std::size_t r = 0; r < n; ++r) {
      double v = fallback[r];
      if (agg[r]) {
        try {
          v = decrypt(*agg[r]);
        } catch (const OverflowError& e) {
          throw OverflowError("round " + std::to_string(t) + ": " + e.what());
        }
      }
      y_p[r] += tp.learning_rate * v;
    }
    model.host_trees.push_back(std::move(top.tree));
    if (options.on_round) options.on_round(t, y_p);
  }

  clock.pause();
  runtime->pump();
  for (const auto& g : guests) {
    auto trees = g->trees();
    model.guest_trees.insert(model.guest_trees.end(), trees.begin(), trees.end());
  }
  return model;
}

DistributedModel Federation::train() { return impl_->train(); }

const CommLedger& Federation::ledger() const { return *impl_->ledger; }

std::shared_ptr<CommLedger> Federation::shared_ledger() const {
  return impl_->ledger;
}

std::vector<std::uint32_t> Federation::active_guests() const {
  return impl_->active;
}

std::size_t Federation::pairwise_keys() const {
  std::size_t total = 0;
  for (const auto& g : impl_->guests) total += g->shared_keys();
  return total / 2;
}

const std::vector<std::string>& Federation::warnings() const {
  return impl_->warnings;
}

PartyTimes Federation::times() const {
  PartyTimes t;
  t.host = impl_->host_cpu;
  t.guests.assign(impl_->guest_data.size(), 0.0);
  for (const auto& g : impl_->guests) t.guests[g->index()] = g->cpu_seconds();
  return t;
}

DistributedModel hybridtree_train(const Dataset& host,
                                  std::span<const Dataset> guests,
                                  const HybridParams& params,
                                  FederationOptions options) {
  Federation fed(host, guests, params, std::move(options));
  return fed.train();
}

std::vector<double> hybridtree_predict_raw(const DistributedModel& model,
                                           const Dataset& host,
                                           std::span<const Dataset> guests,
                                           const PredictOptions& options) {
  if (!model.cipher || !model.cipher->can_decrypt()) {
    throw CryptoError("model has no host private key");
  }
  if (guests.size() != model.n_guests) {
    throw ValidationError("model was trained with " +
                          std::to_string(model.n_guests) + " guests, got " +
                          std::to_string(guests.size()));
  }
  const std::size_t n = host.num_instances();
  auto ledger = options.ledger ? options.ledger : std::make_shared<CommLedger>();
  InProcessTransport transport;
  Endpoint endpoint(PartyId::host(), transport, *ledger);
  const auto holders = link_holders(host, guests);

  std::vector<std::uint32_t> active;
  std::vector<std::vector<std::size_t>> rows_of(guests.size());
  for (std::size_t r = 0; r < n; ++r) {
    for (std::uint32_t u : holders[r]) rows_of[u].push_back(r);
  }
  std::vector<std::unique_ptr<GuestParty>> parties;
  std::vector<GuestParty*> raw;
  for (std::uint32_t u = 0; u < guests.size(); ++u) {
    if (rows_of[u].empty()) continue;
    active.push_back(u);
    auto& rows = rows_of[u];
    std::sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
      return host.instance_ids()[a] < host.instance_ids()[b];
    });
    parties.push_back(std::make_unique<GuestParty>(guests[u], u, model.bottoms_of(u),
                                                   transport, *ledger));
    raw.push_back(parties.back().get());
  }
  GuestRuntime runtime(options.execution, transport, std::move(raw));

  std::set<FeatureId> features;
  for (const Tree& t : model.host_trees) {
    for (FeatureId f : t.features_used()) features.insert(f);
  }
  const ColumnLookup columns(host, features);
  const MessageContext ctx{ContextKind::kInference, options.batch};
  std::vector<std::vector<NodeId>> node_of(model.n_trees(), std::vector<NodeId>(n));
  for (std::size_t t = 0; t < model.n_trees(); ++t) {
    for (std::size_t r = 0; r < n; ++r) {
      node_of[t][r] = route_to_last_layer(model.host_trees[t], columns.row(r));
    }
    for (std::uint32_t u : active) {
      InferenceRoute route;
      route.ctx = ctx;
      route.tree = static_cast<std::uint32_t>(t);
      for (std::size_t r : rows_of[u]) {
        route.instance_ids.push_back(host.instance_ids()[r]);
        route.nodes.push_back(node_of[t][r]);
      }
      endpoint.send(PartyId::guest(u), route);
    }
  }
  runtime.pump();

  Decryptor decrypt(*model.cipher);
  std::vector<double> score(n, 0.0);
  std::vector<double> sum(n);
  std::vector<std::uint32_t> count(n);
  for (std::size_t t = 0; t < model.n_trees(); ++t) {
    std::fill(sum.begin(), sum.end(), 0.0);
    std::fill(count.begin(), count.end(), 0);
    for (std::uint32_t u : active) {
      const PartyId from = PartyId::guest(u);
      std::optional<Message> m = options.execution == Execution::kSequential
                                     ? endpoint.try_receive(from)
                                     : endpoint.receive(from);
      if (!m) throw ProtocolError(to_string(from) + " stalled without replying");
      auto leaf = expect<InferenceLeaf>(std::move(*m), from);
      if (leaf.ctx != ctx || leaf.tree != t) {
        throw ProtocolError("inference reply out of sequence from " +
                            to_string(from));
      }
      for (std::size_t i = 0; i < leaf.instance_ids.size(); ++i) {
        auto r = host.row_of(leaf.instance_ids[i]);
        if (!r) throw ProtocolError("inference reply for an unknown instance");
        sum[*r] += decrypt(leaf.values[i]);
        ++count[*r];
      }
    }
    const Tree& top = model.host_trees[t];
    for (std::size_t r = 0; r < n; ++r) {
      const double v = count[r] > 0 ? sum[r] / count[r]
                                    : top.node(node_of[t][r]).value;
      score[r] += model.learning_rate * v;
    }
  }
  runtime.stop(endpoint);
  return score;
}

std::vector<double> hybridtree_predict(const DistributedModel& model,
                                       const Dataset& host,
                                       std::span<const Dataset> guests,
                                       const PredictOptions& options) {
  return to_output(hybridtree_predict_raw(model, host, guests, options),
                   model.loss);
}

}  // namespace hybridtree
