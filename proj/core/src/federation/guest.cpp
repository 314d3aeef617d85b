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
#include <ctime>
#include <exception>
#include <string>
#include <variant>

#include "hybridtree/common/error.hpp"
#include "hybridtree/crypto/mask.hpp"
#include "parties.hpp"

namespace hybridtree::internal {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Ciphertext add_or_init(const Cipher& cipher, const std::optional<Ciphertext>& acc,
                       const Ciphertext& c) {
  return acc ? cipher.add(*acc, c) : c;
}

}  // namespace

double thread_cpu_seconds() {
  timespec ts{};
  clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
  return static_cast<double>(ts.tv_sec) + 1e-9 * static_cast<double>(ts.tv_nsec);
}

GuestParty::GuestParty(const Dataset& data, const GuestConfig& config,
                       Transport& transport, CommLedger& ledger)
    : index_(config.index),
      data_(&data),
      config_(config),
      endpoint_(PartyId::guest(config.index), transport, ledger) {
  const BinCuts cuts = compute_split_candidates(data, {}, config.max_bins);
  matrix_ = std::make_unique<BinnedMatrix>(data, cuts);
}

GuestParty::GuestParty(const Dataset& data, std::uint32_t index,
                       std::vector<BottomTree> trees, Transport& transport,
                       CommLedger& ledger)
    : index_(index),
      data_(&data),
      endpoint_(PartyId::guest(index), transport, ledger),
      finished_(std::move(trees)) {
  std::set<FeatureId> features;
  for (std::size_t i = 0; i < finished_.size(); ++i) {
    const BottomTree& b = finished_[i];
    if (b.leaf_values.size() != b.tree.num_leaves()) {
      throw ValidationError("bottom tree leaf count does not match values");
    }
    lookup_[{b.round, b.node}] = i;
    leaf_ids_.push_back(b.tree.leaf_ids());
    for (FeatureId f : b.tree.features_used()) features.insert(f);
  }
  columns_ = std::make_unique<ColumnLookup>(data, features);
}

bool GuestParty::step() {
  auto m = endpoint_.try_receive(PartyId::host());
  if (!m) return false;
  handle(*m);
  return true;
}

void GuestParty::serve() {
  while (handle(endpoint_.receive(PartyId::host()))) {
  }
}

bool GuestParty::handle(const Message& m) {
  const double start = thread_cpu_seconds();
  bool running = true;
  std::visit(
      Overloaded{
          [&](const PublicKeyAnnounce& v) { on_public_key(v); },
          [&](const DhExchange& v) { on_roster(v); },
          [&](const GradientShard& v) { on_shard(v); },
          [&](const SplitReply& v) { on_reply(v); },
          [&](const InferenceRoute& v) { on_route(v); },
          [&](const Shutdown&) { running = false; },
          [&](const auto&) {
            throw ProtocolError("guest " + std::to_string(index_) +
                                " received unexpected " +
                                to_string(kind_of(m)));
          }},
      m);
  cpu_ += thread_cpu_seconds() - start;
  return running;
}

void GuestParty::on_public_key(const PublicKeyAnnounce& m) {
  ByteReader r(m.key);
  cipher_ = Cipher::read_public_key(r);
  r.expect_end();
  dh_ = dh_keygen();
  DhExchange out;
  out.ctx = m.ctx;
  out.entries.push_back({index_, dh_.public_key});
  endpoint_.send(PartyId::host(), out);
}

void GuestParty::on_roster(const DhExchange& m) {
  for (const auto& e : m.entries) {
    if (e.guest != index_) keys_[e.guest] = dh_shared(dh_.private_key, e.public_key);
  }
  // Empty acknowledgement: keys are in place.
  DhExchange ack;
  ack.ctx = m.ctx;
  endpoint_.send(PartyId::host(), ack);
}

void GuestParty::on_shard(GradientShard m) {
  if (!cipher_) throw ProtocolError("gradient shard before the public key");
  if (shard_) throw ProtocolError("gradient shard while a round is open");
  gradient_.assign(data_->num_instances(), Ciphertext{});
  growing_.clear();
  for (const auto& n : m.nodes) {
    Node root;
    std::size_t next = 0;
    for (std::size_t pos = 0; pos < n.instance_ids.size(); ++pos) {
      auto row = data_->row_of(n.instance_ids[pos]);
      if (!row) {
        throw ProtocolError("guest " + std::to_string(index_) +
                            " does not hold instance " +
                            std::to_string(n.instance_ids[pos]));
      }
      if (!n.responsible[pos]) continue;
      Ciphertext c = n.gradients[next++];
      c.log2_bound = m.bound_bits;
      gradient_[*row] = std::move(c);
      root.rows.push_back(*row);
    }
    if (root.rows.empty()) continue;
    std::sort(root.rows.begin(), root.rows.end());
    Growing g;
    g.host_node = n.node;
    g.nodes.push_back(std::move(root));
    growing_.push_back(std::move(g));
  }
  shard_ = std::move(m);
  layer_ = 1;
  advance();
}

Ciphertext GuestParty::encrypted_sum(std::span<const std::size_t> rows) const {
  std::optional<Ciphertext> acc;
  for (std::size_t r : rows) acc = add_or_init(*cipher_, acc, gradient_[r]);
  if (!acc) throw ProtocolError("encrypted sum over no instances");
  return *acc;
}

void GuestParty::split_node(Growing& g, std::size_t node, const CandidateRef& c) {
  std::vector<std::size_t> left;
  std::vector<std::size_t> right;
  partition_rows(*matrix_, c, g.nodes[node].rows, left, right);
  const std::size_t depth = g.nodes[node].depth + 1;
  Node l;
  l.rows = std::move(left);
  l.depth = depth;
  Node r;
  r.rows = std::move(right);
  r.depth = depth;
  g.nodes.push_back(std::move(l));
  g.nodes.push_back(std::move(r));
  Node& parent = g.nodes[node];
  parent.leaf = false;
  parent.split = c;
  parent.left = g.nodes.size() - 2;
  parent.right = g.nodes.size() - 1;
}

void GuestParty::advance() {
  const bool assisted = config_.mode == GuestSplitMode::kAssisted;
  while (layer_ < config_.guest_depth) {
    SplitQuery query;
    query.ctx = shard_->ctx;
    query.layer = layer_;
    pending_.clear();
    for (std::size_t gi = 0; gi < growing_.size(); ++gi) {
      Growing& g = growing_[gi];
      const std::size_t existing = g.nodes.size();
      for (std::size_t ni = 0; ni < existing; ++ni) {
        if (g.nodes[ni].depth != layer_) continue;
        const std::vector<std::size_t>& rows = g.nodes[ni].rows;
        std::vector<std::size_t> count_left;
        std::vector<CandidateRef> cands =
            valid_candidates(*matrix_, rows, &count_left);
        if (cands.empty()) continue;
        if (!assisted) {
          // Most balanced split; ties keep the earliest candidate.
          std::size_t best = 0;
          double best_score = -1;
          for (std::size_t i = 0; i < cands.size(); ++i) {
            const double score = static_cast<double>(count_left[i]) *
                                 static_cast<double>(rows.size() - count_left[i]);
            if (score > best_score) {
              best_score = score;
              best = i;
            }
          }
          split_node(g, ni, cands[best]);
          continue;
        }
        SplitQuery::Node qn;
        qn.node = g.host_node;
        qn.local = static_cast<std::uint32_t>(ni);
        qn.total = encrypted_sum(rows);
        qn.count = rows.size();
        std::size_t i = 0;
        while (i < cands.size()) {
          const std::size_t k = cands[i].feature;
          const auto bins = matrix_->bins(k);
          std::vector<std::optional<Ciphertext>> acc(matrix_->cuts(k).size() + 1);
          for (std::size_t r : rows) {
            auto& a = acc[bins[r]];
            a = add_or_init(*cipher_, a, gradient_[r]);
          }
          std::optional<Ciphertext> run;
          std::size_t b = 0;
          for (; i < cands.size() && cands[i].feature == k; ++i) {
            for (; b <= cands[i].cut; ++b) {
              if (acc[b]) run = add_or_init(*cipher_, run, *acc[b]);
            }
            qn.candidates.push_back({*run, count_left[i]});
          }
        }
        query.nodes.push_back(std::move(qn));
        pending_.push_back({gi, ni, std::move(cands)});
      }
    }
    if (assisted) {
      endpoint_.send(PartyId::host(), query);
      return;
    }
    ++layer_;
  }
  finish_round();
}

void GuestParty::on_reply(const SplitReply& m) {
  if (!shard_ || m.layer != layer_ || m.ctx != shard_->ctx) {
    throw ProtocolError("split reply out of sequence");
  }
  if (m.choices.size() != pending_.size()) {
    throw ProtocolError("split reply has " + std::to_string(m.choices.size()) +
                        " choices for " + std::to_string(pending_.size()) +
                        " queried nodes");
  }
  for (std::size_t i = 0; i < pending_.size(); ++i) {
    const std::int32_t choice = m.choices[i];
    if (choice < 0) continue;
    const Pending& p = pending_[i];
    if (static_cast<std::size_t>(choice) >= p.candidates.size()) {
      throw ProtocolError("split reply names an unknown candidate");
    }
    split_node(growing_[p.growing], p.node, p.candidates[choice]);
  }
  pending_.clear();
  ++layer_;
  advance();
}

void GuestParty::finish_round() {
  const int lf = config_.leaf_frac_bits;
  const int zero_scale = config_.frac_bits + lf;
  const auto round = static_cast<std::uint32_t>(shard_->ctx.index);
  std::vector<const Ciphertext*> value_of_row(data_->num_instances(), nullptr);

  for (const Growing& g : growing_) {
    BottomTree bottom;
    bottom.guest = index_;
    bottom.round = round;
    bottom.node = g.host_node;
    std::vector<TreeNode> nodes;
    // Preorder emission keeps leaf values in leaf-id order.
    auto emit = [&](auto&& self, std::size_t ni) -> void {
      const Node& n = g.nodes[ni];
      const std::size_t at = nodes.size();
      nodes.emplace_back();
      if (n.leaf) {
        const Ciphertext sum = encrypted_sum(n.rows);
        const mpz_class k = cipher_->codec().encode_signed(
            -1.0 / (static_cast<double>(n.rows.size()) + config_.lambda), lf);
        bottom.leaf_values.push_back(cipher_->mul_plain(sum, k, lf));
        return;
      }
      nodes[at].is_leaf = false;
      nodes[at].split = {matrix_->feature_id(n.split.feature),
                         matrix_->cuts(n.split.feature)[n.split.cut]};
      nodes[at].left = static_cast<NodeId>(nodes.size());
      self(self, n.left);
      nodes[at].right = static_cast<NodeId>(nodes.size());
      self(self, n.right);
    };
    emit(emit, 0);
    bottom.tree = Tree(std::move(nodes));
    finished_.push_back(std::move(bottom));
  }

  // Leaf ciphertexts live in finished_; point rows at them once it is stable.
  std::size_t first = finished_.size() - growing_.size();
  for (std::size_t gi = 0; gi < growing_.size(); ++gi) {
    const BottomTree& b = finished_[first + gi];
    std::size_t leaf = 0;
    auto walk = [&](auto&& self, std::size_t ni) -> void {
      const Node& n = growing_[gi].nodes[ni];
      if (n.leaf) {
        for (std::size_t r : n.rows) value_of_row[r] = &b.leaf_values[leaf];
        ++leaf;
        return;
      }
      self(self, n.left);
      self(self, n.right);
    };
    walk(walk, 0);
  }

  LeafContribution out;
  out.ctx = shard_->ctx;
  for (const auto& n : shard_->nodes) {
    LeafContribution::Node cn;
    cn.node = n.node;
    std::map<std::uint32_t, const std::vector<std::uint32_t>*> peers;
    for (const auto& c : n.co_holders) peers[c.position] = &c.guests;
    for (std::size_t pos = 0; pos < n.instance_ids.size(); ++pos) {
      const InstanceId id = n.instance_ids[pos];
      Ciphertext v = n.responsible[pos]
                         ? *value_of_row[*data_->row_of(id)]
                         : cipher_->encrypt(0, zero_scale);
      auto it = peers.find(static_cast<std::uint32_t>(pos));
      if (it != peers.end()) {
        std::vector<std::size_t> group(it->second->begin(), it->second->end());
        v = apply_masks(*cipher_, v, index_, group, keys_,
                        {shard_->ctx.index, static_cast<std::uint64_t>(n.node), id});
      }
      cn.values.push_back(std::move(v));
    }
    out.nodes.push_back(std::move(cn));
  }
  endpoint_.send(PartyId::host(), out);
  shard_.reset();
  growing_.clear();
  pending_.clear();
  gradient_.clear();
}

void GuestParty::on_route(const InferenceRoute& m) {
  InferenceLeaf out;
  out.ctx = m.ctx;
  out.tree = m.tree;
  for (std::size_t i = 0; i < m.instance_ids.size(); ++i) {
    auto it = lookup_.find({m.tree, m.nodes[i]});
    if (it == lookup_.end()) continue;
    auto row = data_->row_of(m.instance_ids[i]);
    if (!row) {
      throw ProtocolError("guest " + std::to_string(index_) +
                          " does not hold instance " +
                          std::to_string(m.instance_ids[i]));
    }
    const BottomTree& b = finished_[it->second];
    const NodeId leaf = b.tree.route(columns_->row(*row));
    const auto& ids = leaf_ids_[it->second];
    const auto at = std::lower_bound(ids.begin(), ids.end(), leaf) - ids.begin();
    out.instance_ids.push_back(m.instance_ids[i]);
    out.values.push_back(b.leaf_values[at]);
  }
  endpoint_.send(PartyId::host(), out);
}

GuestRuntime::GuestRuntime(Execution execution, Transport& transport,
                           std::vector<GuestParty*> guests)
    : execution_(execution), transport_(&transport), guests_(std::move(guests)) {
  if (execution_ != Execution::kThreaded) return;
  for (GuestParty* g : guests_) {
    threads_.emplace_back([g, t = transport_] {
      try {
        g->serve();
      } catch (const std::exception& e) {
        t->abort("guest " + std::to_string(g->index()) + ": " + e.what());
      }
    });
  }
}

GuestRuntime::~GuestRuntime() {
  if (!threads_.empty() && !stopped_) transport_->abort("federation closed");
  for (auto& t : threads_) {
    if (t.joinable()) t.join();
  }
}

void GuestRuntime::pump() {
  if (execution_ == Execution::kThreaded) return;
  bool progress = true;
  while (progress) {
    progress = false;
    for (GuestParty* g : guests_) {
      while (g->step()) progress = true;
    }
  }
}

void GuestRuntime::stop(Endpoint& host) {
  if (stopped_) return;
  stopped_ = true;
  try {
    for (GuestParty* g : guests_) host.send(PartyId::guest(g->index()), Shutdown{});
    pump();
  } catch (const ProtocolError&) {
    // Transport already aborted; threads are unblocked by the abort.
  }
  for (auto& t : threads_) {
    if (t.joinable()) t.join();
  }
}

}  // namespace hybridtree::internal
