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

#include "hybridtree/federation/messages.hpp"

#include <algorithm>
#include <type_traits>

#include "hybridtree/common/error.hpp"

namespace hybridtree {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void write_ids(ByteWriter& w, const std::vector<InstanceId>& ids) {
  w.u32(static_cast<std::uint32_t>(ids.size()));
  for (InstanceId id : ids) w.u64(id);
}

std::vector<InstanceId> read_ids(ByteReader& r) {
  const std::uint32_t n = r.u32();
  std::vector<InstanceId> ids;
  ids.reserve(std::min<std::size_t>(n, r.remaining() / 8));
  for (std::uint32_t i = 0; i < n; ++i) {
    ids.push_back(r.u64());
    if (i > 0 && ids[i] <= ids[i - 1]) {
      throw ProtocolError("instance ids are not sorted and unique");
    }
  }
  return ids;
}

void write_cts(ByteWriter& w, const std::vector<Ciphertext>& cs) {
  w.u32(static_cast<std::uint32_t>(cs.size()));
  for (const Ciphertext& c : cs) write_ciphertext(w, c);
}

std::vector<Ciphertext> read_cts(ByteReader& r) {
  const std::uint32_t n = r.u32();
  std::vector<Ciphertext> cs;
  cs.reserve(std::min<std::size_t>(n, r.remaining() / 6));
  for (std::uint32_t i = 0; i < n; ++i) cs.push_back(read_ciphertext(r));
  return cs;
}

void write_body(ByteWriter& w, const PublicKeyAnnounce& m) { w.blob(m.key); }

void write_body(ByteWriter& w, const DhExchange& m) {
  w.u32(static_cast<std::uint32_t>(m.entries.size()));
  for (const auto& e : m.entries) {
    w.u32(e.guest);
    w.bytes(e.public_key);
  }
}

void write_body(ByteWriter& w, const GradientShard& m) {
  w.u32(m.bound_bits);
  w.u32(static_cast<std::uint32_t>(m.nodes.size()));
  for (const auto& n : m.nodes) {
    w.u32(static_cast<std::uint32_t>(n.node));
    write_ids(w, n.instance_ids);
    w.blob(n.responsible);
    write_cts(w, n.gradients);
    w.u32(static_cast<std::uint32_t>(n.co_holders.size()));
    for (const auto& c : n.co_holders) {
      w.u32(c.position);
      w.u32(static_cast<std::uint32_t>(c.guests.size()));
      for (std::uint32_t g : c.guests) w.u32(g);
    }
  }
}

void write_body(ByteWriter& w, const LeafContribution& m) {
  w.u32(static_cast<std::uint32_t>(m.nodes.size()));
  for (const auto& n : m.nodes) {
    w.u32(static_cast<std::uint32_t>(n.node));
    write_cts(w, n.values);
  }
}

void write_body(ByteWriter& w, const SplitQuery& m) {
  w.u32(m.layer);
  w.u32(static_cast<std::uint32_t>(m.nodes.size()));
  for (const auto& n : m.nodes) {
    w.u32(static_cast<std::uint32_t>(n.node));
    w.u32(n.local);
    write_ciphertext(w, n.total);
    w.u64(n.count);
    w.u32(static_cast<std::uint32_t>(n.candidates.size()));
    for (const auto& c : n.candidates) {
      write_ciphertext(w, c.sum_left);
      w.u64(c.count_left);
    }
  }
}

void write_body(ByteWriter& w, const SplitReply& m) {
  w.u32(m.layer);
  w.u32(static_cast<std::uint32_t>(m.choices.size()));
  for (std::int32_t c : m.choices) w.u32(static_cast<std::uint32_t>(c));
}

void write_body(ByteWriter& w, const InferenceRoute& m) {
  w.u32(m.tree);
  write_ids(w, m.instance_ids);
  for (NodeId n : m.nodes) w.u32(static_cast<std::uint32_t>(n));
}

void write_body(ByteWriter& w, const InferenceLeaf& m) {
  w.u32(m.tree);
  write_ids(w, m.instance_ids);
  write_cts(w, m.values);
}

void write_body(ByteWriter&, const Shutdown&) {}

void read_body(ByteReader& r, PublicKeyAnnounce& m) { m.key = r.blob(); }

void read_body(ByteReader& r, DhExchange& m) {
  const std::uint32_t n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    DhExchange::Entry e;
    e.guest = r.u32();
    auto pk = r.bytes(e.public_key.size());
    std::copy(pk.begin(), pk.end(), e.public_key.begin());
    m.entries.push_back(e);
  }
}

void read_body(ByteReader& r, GradientShard& m) {
  m.bound_bits = r.u32();
  const std::uint32_t n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    GradientShard::Node node;
    node.node = static_cast<NodeId>(r.u32());
    node.instance_ids = read_ids(r);
    node.responsible = r.blob();
    node.gradients = read_cts(r);
    if (node.responsible.size() != node.instance_ids.size()) {
      throw ProtocolError("responsibility flags do not match instance ids");
    }
    const auto owned = std::count_if(node.responsible.begin(),
                                     node.responsible.end(),
                                     [](std::uint8_t f) { return f != 0; });
    if (static_cast<std::size_t>(owned) != node.gradients.size()) {
      throw ProtocolError("gradient count does not match responsibilities");
    }
    const std::uint32_t k = r.u32();
    for (std::uint32_t j = 0; j < k; ++j) {
      GradientShard::CoHolders c;
      c.position = r.u32();
      if (c.position >= node.instance_ids.size()) {
        throw ProtocolError("co-holder position out of range");
      }
      const std::uint32_t g = r.u32();
      for (std::uint32_t q = 0; q < g; ++q) c.guests.push_back(r.u32());
      node.co_holders.push_back(std::move(c));
    }
    m.nodes.push_back(std::move(node));
  }
}

void read_body(ByteReader& r, LeafContribution& m) {
  const std::uint32_t n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    LeafContribution::Node node;
    node.node = static_cast<NodeId>(r.u32());
    node.values = read_cts(r);
    m.nodes.push_back(std::move(node));
  }
}

void read_body(ByteReader& r, SplitQuery& m) {
  m.layer = r.u32();
  const std::uint32_t n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    SplitQuery::Node node;
    node.node = static_cast<NodeId>(r.u32());
    node.local = r.u32();
    node.total = read_ciphertext(r);
    node.count = r.u64();
    const std::uint32_t k = r.u32();
    for (std::uint32_t j = 0; j < k; ++j) {
      SplitQuery::Candidate c;
      c.sum_left = read_ciphertext(r);
      c.count_left = r.u64();
      node.candidates.push_back(std::move(c));
    }
    m.nodes.push_back(std::move(node));
  }
}

void read_body(ByteReader& r, SplitReply& m) {
  m.layer = r.u32();
  const std::uint32_t n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    m.choices.push_back(static_cast<std::int32_t>(r.u32()));
  }
}

void read_body(ByteReader& r, InferenceRoute& m) {
  m.tree = r.u32();
  m.instance_ids = read_ids(r);
  for (std::size_t i = 0; i < m.instance_ids.size(); ++i) {
    m.nodes.push_back(static_cast<NodeId>(r.u32()));
  }
}

void read_body(ByteReader& r, InferenceLeaf& m) {
  m.tree = r.u32();
  m.instance_ids = read_ids(r);
  m.values = read_cts(r);
  if (m.values.size() != m.instance_ids.size()) {
    throw ProtocolError("leaf values do not match instance ids");
  }
}

void read_body(ByteReader&, Shutdown&) {}

template <std::size_t I = 0>
Message make_message(std::size_t index) {
  if constexpr (I < std::variant_size_v<Message>) {
    if (index == I) return Message(std::in_place_index<I>);
    return make_message<I + 1>(index);
  } else {
    throw ProtocolError("unknown message kind " + std::to_string(index + 1));
  }
}

}  // namespace

std::string to_string(const PartyId& party) {
  if (party.role == Role::kHost) return "host";
  return "guest " + std::to_string(party.index);
}

MessageKind kind_of(const Message& m) {
  return static_cast<MessageKind>(m.index() + 1);
}

const MessageContext& context_of(const Message& m) {
  return std::visit([](const auto& v) -> const MessageContext& { return v.ctx; },
                    m);
}

std::uint32_t layer_of(const Message& m) {
  return std::visit(
      Overloaded{[](const SplitQuery& q) { return q.layer; },
                 [](const SplitReply& q) { return q.layer; },
                 [](const auto&) { return std::uint32_t{0}; }},
      m);
}

std::string to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::kPublicKeyAnnounce: return "PublicKeyAnnounce";
    case MessageKind::kDhExchange: return "DhExchange";
    case MessageKind::kGradientShard: return "GradientShard";
    case MessageKind::kLeafContribution: return "LeafContribution";
    case MessageKind::kSplitQuery: return "SplitQuery";
    case MessageKind::kSplitReply: return "SplitReply";
    case MessageKind::kInferenceRoute: return "InferenceRoute";
    case MessageKind::kInferenceLeaf: return "InferenceLeaf";
    case MessageKind::kShutdown: return "Shutdown";
  }
  return "unknown";
}

std::vector<std::uint8_t> encode_frame(const Message& m) {
  ByteWriter w;
  w.u32(0);
  w.u8(static_cast<std::uint8_t>(kind_of(m)));
  const MessageContext& ctx = context_of(m);
  w.u8(static_cast<std::uint8_t>(ctx.kind));
  w.u64(ctx.index);
  std::visit([&w](const auto& v) { write_body(w, v); }, m);
  std::vector<std::uint8_t> frame = w.release();
  const auto len = static_cast<std::uint32_t>(frame.size() - 4);
  for (int i = 0; i < 4; ++i) {
    frame[i] = static_cast<std::uint8_t>(len >> (8 * (3 - i)));
  }
  return frame;
}

Message decode_frame(std::span<const std::uint8_t> frame) {
  ByteReader r(frame);
  if (r.u32() != frame.size() - 4) {
    throw ProtocolError("frame length does not match its header");
  }
  const std::uint8_t tag = r.u8();
  if (tag == 0) throw ProtocolError("unknown message kind 0");
  Message m = make_message(tag - 1);
  const std::uint8_t ctx_kind = r.u8();
  if (ctx_kind > static_cast<std::uint8_t>(ContextKind::kControl)) {
    throw ProtocolError("unknown context kind " + std::to_string(ctx_kind));
  }
  const std::uint64_t ctx_index = r.u64();
  std::visit(
      [&](auto& v) {
        v.ctx = {static_cast<ContextKind>(ctx_kind), ctx_index};
        read_body(r, v);
      },
      m);
  r.expect_end();
  return m;
}

}  // namespace hybridtree
