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

#ifndef HYBRIDTREE_SRC_FEDERATION_PARTIES_HPP_
#define HYBRIDTREE_SRC_FEDERATION_PARTIES_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

#include "hybridtree/crypto/cipher.hpp"
#include "hybridtree/crypto/dh.hpp"
#include "hybridtree/data/bin_cuts.hpp"
#include "hybridtree/data/dataset.hpp"
#include "hybridtree/federation/model.hpp"
#include "hybridtree/federation/protocol.hpp"
#include "hybridtree/federation/transport.hpp"
#include "hybridtree/gbdt/binned.hpp"
#include "hybridtree/gbdt/trainer.hpp"

namespace hybridtree::internal {

// CPU time of the calling thread, in seconds.
double thread_cpu_seconds();

struct GuestConfig {
  std::uint32_t index = 0;
  std::size_t guest_depth = 2;
  double lambda = 1;
  GuestSplitMode mode = GuestSplitMode::kAssisted;
  std::size_t max_bins = 32;
  int frac_bits = kDefaultFracBits;
  int leaf_frac_bits = kLeafMultiplierFracBits;
};

// A guest's protocol state machine. All interaction goes through its
// endpoint; the owning runtime only decides on which thread it runs.
class GuestParty {
 public:
  // Training guest.
  GuestParty(const Dataset& data, const GuestConfig& config,
             Transport& transport, CommLedger& ledger);
  // Inference guest holding its bottom trees.
  GuestParty(const Dataset& data, std::uint32_t index,
             std::vector<BottomTree> trees, Transport& transport,
             CommLedger& ledger);

  // Handles one waiting message; false when none was queued.
  bool step();
  // Handles messages until Shutdown.
  void serve();

  std::uint32_t index() const { return index_; }
  std::size_t shared_keys() const { return keys_.size(); }
  std::vector<BottomTree> trees() const { return finished_; }
  double cpu_seconds() const { return cpu_; }

 private:
  struct Node {
    std::vector<std::size_t> rows;
    std::size_t depth = 1;
    bool leaf = true;
    CandidateRef split;
    std::size_t left = 0;
    std::size_t right = 0;
  };
  struct Growing {
    NodeId host_node = 0;
    std::vector<Node> nodes;
  };
  struct Pending {
    std::size_t growing = 0;
    std::size_t node = 0;
    std::vector<CandidateRef> candidates;
  };

  // False after Shutdown.
  bool handle(const Message& m);
  void on_public_key(const PublicKeyAnnounce& m);
  void on_roster(const DhExchange& m);
  void on_shard(GradientShard m);
  void on_reply(const SplitReply& m);
  void on_route(const InferenceRoute& m);

  // Decides or queries every open node at the current layer, then keeps
  // going until a reply is needed or the bottom trees are complete.
  void advance();
  void split_node(Growing& g, std::size_t node, const CandidateRef& c);
  void finish_round();
  Ciphertext encrypted_sum(std::span<const std::size_t> rows) const;

  std::uint32_t index_;
  const Dataset* data_;
  GuestConfig config_;
  Endpoint endpoint_;
  std::shared_ptr<const Cipher> cipher_;
  DhKeyPair dh_;
  std::map<std::size_t, SharedKey> keys_;
  std::unique_ptr<BinnedMatrix> matrix_;

  // Current round.
  std::optional<GradientShard> shard_;
  std::vector<Ciphertext> gradient_;
  std::vector<Growing> growing_;
  std::vector<Pending> pending_;
  std::uint32_t layer_ = 0;

  std::vector<BottomTree> finished_;
  std::map<std::pair<std::uint32_t, NodeId>, std::size_t> lookup_;
  std::vector<std::vector<NodeId>> leaf_ids_;
  std::unique_ptr<ColumnLookup> columns_;
  double cpu_ = 0;
};

// Runs guests either inline when the host waits or on their own threads.
class GuestRuntime {
 public:
  GuestRuntime(Execution execution, Transport& transport,
               std::vector<GuestParty*> guests);
  ~GuestRuntime();
  // Sequential mode: lets every guest handle its queued messages until all
  // are idle. No-op when threaded.
  void pump();
  // Sends Shutdown and joins threads.
  void stop(Endpoint& host);

 private:
  Execution execution_;
  Transport* transport_;
  std::vector<GuestParty*> guests_;
  std::vector<std::thread> threads_;
  bool stopped_ = false;
};

}  // namespace hybridtree::internal

#endif  // HYBRIDTREE_SRC_FEDERATION_PARTIES_HPP_
