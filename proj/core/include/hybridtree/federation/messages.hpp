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

#ifndef HYBRIDTREE_FEDERATION_MESSAGES_HPP_
#define HYBRIDTREE_FEDERATION_MESSAGES_HPP_

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "hybridtree/common/types.hpp"
#include "hybridtree/crypto/cipher.hpp"
#include "hybridtree/crypto/dh.hpp"
#include "hybridtree/gbdt/tree.hpp"

namespace hybridtree {

enum class Role : std::uint8_t { kHost = 0, kGuest = 1 };

struct PartyId {
  Role role = Role::kHost;
  std::uint32_t index = 0;

  static PartyId host() { return {Role::kHost, 0}; }
  static PartyId guest(std::uint32_t i) { return {Role::kGuest, i}; }
  auto operator<=>(const PartyId&) const = default;
};

std::string to_string(const PartyId& party);

// What a message belongs to: key setup, one boosting round, or one
// inference batch.
enum class ContextKind : std::uint8_t {
  kSetup = 0,
  kTraining = 1,
  kInference = 2,
  kControl = 3,
};

struct MessageContext {
  ContextKind kind = ContextKind::kSetup;
  // Boosting round for training, batch number for inference.
  std::uint64_t index = 0;
  auto operator<=>(const MessageContext&) const = default;
};

// Host to guests: the AHE public key.
struct PublicKeyAnnounce {
  MessageContext ctx;
  std::vector<std::uint8_t> key;
};

// Guest to host: its own DH public value (one entry). Host to guests: the
// roster of every participating guest's value.
struct DhExchange {
  struct Entry {
    std::uint32_t guest = 0;
    DhPublicKey public_key{};
  };
  MessageContext ctx;
  std::vector<Entry> entries;
};

// Host to guest: encrypted gradients of one round, batched over last-layer
// nodes. Every instance the guest holds at a node is listed; gradients are
// present only for instances the guest is responsible for.
struct GradientShard {
  struct CoHolders {
    // Position in `instance_ids`.
    std::uint32_t position = 0;
    // Every guest holding the instance, ascending.
    std::vector<std::uint32_t> guests;
  };
  struct Node {
    NodeId node = 0;
    std::vector<InstanceId> instance_ids;
    std::vector<std::uint8_t> responsible;
    // One per responsible instance, in instance order.
    std::vector<Ciphertext> gradients;
    // Only instances held by two or more guests.
    std::vector<CoHolders> co_holders;
  };
  MessageContext ctx;
  // Public bound: every encoded gradient has |value| < 2^bound_bits.
  std::uint32_t bound_bits = 0;
  std::vector<Node> nodes;
};

// Guest to host: masked encrypted leaf values aligned with the shard's
// instance lists.
struct LeafContribution {
  struct Node {
    NodeId node = 0;
    std::vector<Ciphertext> values;
  };
  MessageContext ctx;
  std::vector<Node> nodes;
};

// Guest to host, assisted mode: encrypted left-side gradient sums of every
// valid split candidate at each open node of one bottom layer.
struct SplitQuery {
  struct Candidate {
    Ciphertext sum_left;
    std::uint64_t count_left = 0;
  };
  struct Node {
    NodeId node = 0;
    std::uint32_t local = 0;
    Ciphertext total;
    std::uint64_t count = 0;
    std::vector<Candidate> candidates;
  };
  MessageContext ctx;
  std::uint32_t layer = 0;
  std::vector<Node> nodes;
};

// Host to guest: chosen candidate per queried node, -1 for a leaf.
struct SplitReply {
  MessageContext ctx;
  std::uint32_t layer = 0;
  std::vector<std::int32_t> choices;
};

// Host to guest: the host last-layer node of each instance for one tree.
struct InferenceRoute {
  MessageContext ctx;
  std::uint32_t tree = 0;
  std::vector<InstanceId> instance_ids;
  std::vector<NodeId> nodes;
};

// Guest to host: encrypted bottom-leaf values for the routed instances the
// guest has a bottom tree for.
struct InferenceLeaf {
  MessageContext ctx;
  std::uint32_t tree = 0;
  std::vector<InstanceId> instance_ids;
  std::vector<Ciphertext> values;
};

struct Shutdown {
  MessageContext ctx{ContextKind::kControl, 0};
};

using Message =
    std::variant<PublicKeyAnnounce, DhExchange, GradientShard,
                 LeafContribution, SplitQuery, SplitReply, InferenceRoute,
                 InferenceLeaf, Shutdown>;

// Wire tags, in variant order starting at 1.
enum class MessageKind : std::uint8_t {
  kPublicKeyAnnounce = 1,
  kDhExchange,
  kGradientShard,
  kLeafContribution,
  kSplitQuery,
  kSplitReply,
  kInferenceRoute,
  kInferenceLeaf,
  kShutdown,
};

MessageKind kind_of(const Message& m);
const MessageContext& context_of(const Message& m);
// Bottom layer of split messages, 0 for every other kind.
std::uint32_t layer_of(const Message& m);
std::string to_string(MessageKind kind);

// Frame: u32 length of the rest, u8 kind tag, u8 context kind, u64 context
// index, then the fields in declared order (big-endian).
std::vector<std::uint8_t> encode_frame(const Message& m);
// Throws ProtocolError on malformed frames, including unsorted instance ids.
Message decode_frame(std::span<const std::uint8_t> frame);

}  // namespace hybridtree

#endif  // HYBRIDTREE_FEDERATION_MESSAGES_HPP_
