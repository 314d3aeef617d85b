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

#ifndef HYBRIDTREE_FEDERATION_TRANSPORT_HPP_
#define HYBRIDTREE_FEDERATION_TRANSPORT_HPP_

#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hybridtree/federation/messages.hpp"

namespace hybridtree {

using Frame = std::vector<std::uint8_t>;

// Reliable frame delivery with FIFO order per (sender, receiver) pair.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual void send(const PartyId& from, const PartyId& to, Frame frame) = 0;
  // Blocks until a frame from `from` arrives. Throws ProtocolError after
  // abort().
  virtual Frame receive(const PartyId& me, const PartyId& from) = 0;
  virtual std::optional<Frame> try_receive(const PartyId& me,
                                           const PartyId& from) = 0;
  // Fails every pending and future receive with `reason`.
  virtual void abort(const std::string& reason) = 0;
};

// Queues in shared memory; safe for concurrent senders and receivers.
class InProcessTransport : public Transport {
 public:
  void send(const PartyId& from, const PartyId& to, Frame frame) override;
  Frame receive(const PartyId& me, const PartyId& from) override;
  std::optional<Frame> try_receive(const PartyId& me,
                                   const PartyId& from) override;
  void abort(const std::string& reason) override;

 private:
  using Key = std::pair<PartyId, PartyId>;  // (receiver, sender)
  std::mutex mu_;
  std::condition_variable cv_;
  std::map<Key, std::deque<Frame>> queues_;
  std::optional<std::string> aborted_;
};

struct LedgerKey {
  MessageContext ctx;
  MessageKind kind = MessageKind::kShutdown;
  std::uint32_t layer = 0;
  Role sender = Role::kHost;
  auto operator<=>(const LedgerKey&) const = default;
};

struct LedgerTotals {
  std::uint64_t messages = 0;
  std::uint64_t bytes = 0;
};

// Message counts and wire bytes per (context, kind, layer, direction).
// A phase is one such group: all frames of one kind and bottom layer sent
// in one direction within a round or inference batch.
class CommLedger {
 public:
  void record(const PartyId& from, const Message& m, std::size_t bytes);

  std::map<LedgerKey, LedgerTotals> entries() const;
  // Distinct phases within one context.
  std::size_t phases(const MessageContext& ctx) const;
  LedgerTotals totals() const;
  LedgerTotals totals(ContextKind kind) const;
  LedgerTotals totals(const MessageContext& ctx) const;
  LedgerTotals totals(const MessageContext& ctx, MessageKind kind) const;
  // Contexts of one kind that saw traffic, ascending.
  std::vector<MessageContext> contexts(ContextKind kind) const;
  nlohmann::json to_json() const;

 private:
  mutable std::mutex mu_;
  std::map<LedgerKey, LedgerTotals> entries_;
};

// Typed, accounted view of a transport for one party.
class Endpoint {
 public:
  Endpoint(PartyId self, Transport& transport, CommLedger& ledger)
      : self_(self), transport_(&transport), ledger_(&ledger) {}

  const PartyId& self() const { return self_; }
  void send(const PartyId& to, const Message& m);
  Message receive(const PartyId& from);
  std::optional<Message> try_receive(const PartyId& from);

 private:
  PartyId self_;
  Transport* transport_;
  CommLedger* ledger_;
};

}  // namespace hybridtree

#endif  // HYBRIDTREE_FEDERATION_TRANSPORT_HPP_
