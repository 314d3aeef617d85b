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

#include "hybridtree/federation/transport.hpp"

#include <set>
#include <tuple>
#include <utility>

#include "hybridtree/common/error.hpp"

namespace hybridtree {

void InProcessTransport::send(const PartyId& from, const PartyId& to,
                              Frame frame) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (aborted_) throw ProtocolError(*aborted_);
    queues_[{to, from}].push_back(std::move(frame));
  }
  cv_.notify_all();
}

Frame InProcessTransport::receive(const PartyId& me, const PartyId& from) {
  std::unique_lock<std::mutex> lock(mu_);
  auto& q = queues_[{me, from}];
  cv_.wait(lock, [&] { return aborted_ || !q.empty(); });
  if (aborted_) throw ProtocolError(*aborted_);
  Frame f = std::move(q.front());
  q.pop_front();
  return f;
}

std::optional<Frame> InProcessTransport::try_receive(const PartyId& me,
                                                     const PartyId& from) {
  std::lock_guard<std::mutex> lock(mu_);
  if (aborted_) throw ProtocolError(*aborted_);
  auto it = queues_.find({me, from});
  if (it == queues_.end() || it->second.empty()) return std::nullopt;
  Frame f = std::move(it->second.front());
  it->second.pop_front();
  return f;
}

void InProcessTransport::abort(const std::string& reason) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (!aborted_) aborted_ = reason;
  }
  cv_.notify_all();
}

void CommLedger::record(const PartyId& from, const Message& m,
                        std::size_t bytes) {
  LedgerKey key{context_of(m), kind_of(m), layer_of(m), from.role};
  std::lock_guard<std::mutex> lock(mu_);
  LedgerTotals& t = entries_[key];
  ++t.messages;
  t.bytes += bytes;
}

std::map<LedgerKey, LedgerTotals> CommLedger::entries() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_;
}

std::size_t CommLedger::phases(const MessageContext& ctx) const {
  std::lock_guard<std::mutex> lock(mu_);
  std::size_t n = 0;
  for (const auto& [key, t] : entries_) n += key.ctx == ctx;
  return n;
}

LedgerTotals CommLedger::totals() const {
  std::lock_guard<std::mutex> lock(mu_);
  LedgerTotals out;
  for (const auto& [key, t] : entries_) {
    out.messages += t.messages;
    out.bytes += t.bytes;
  }
  return out;
}

LedgerTotals CommLedger::totals(ContextKind kind) const {
  std::lock_guard<std::mutex> lock(mu_);
  LedgerTotals out;
  for (const auto& [key, t] : entries_) {
    if (key.ctx.kind != kind) continue;
    out.messages += t.messages;
    out.bytes += t.bytes;
  }
  return out;
}

LedgerTotals CommLedger::totals(const MessageContext& ctx) const {
  std::lock_guard<std::mutex> lock(mu_);
  LedgerTotals out;
  for (const auto& [key, t] : entries_) {
    if (key.ctx != ctx) continue;
    out.messages += t.messages;
    out.bytes += t.bytes;
  }
  return out;
}

LedgerTotals CommLedger::totals(const MessageContext& ctx,
                                MessageKind kind) const {
  std::lock_guard<std::mutex> lock(mu_);
  LedgerTotals out;
  for (const auto& [key, t] : entries_) {
    if (key.ctx != ctx || key.kind != kind) continue;
    out.messages += t.messages;
    out.bytes += t.bytes;
  }
  return out;
}

std::vector<MessageContext> CommLedger::contexts(ContextKind kind) const {
  std::lock_guard<std::mutex> lock(mu_);
  std::set<MessageContext> seen;
  for (const auto& [key, t] : entries_) {
    if (key.ctx.kind == kind) seen.insert(key.ctx);
  }
  return {seen.begin(), seen.end()};
}

nlohmann::json CommLedger::to_json() const {
  static const char* kContextNames[] = {"setup", "training", "inference",
                                        "control"};
  std::lock_guard<std::mutex> lock(mu_);
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [key, t] : entries_) {
    out.push_back({{"context", kContextNames[static_cast<int>(key.ctx.kind)]},
                   {"index", key.ctx.index},
                   {"kind", to_string(key.kind)},
                   {"layer", key.layer},
                   {"from", key.sender == Role::kHost ? "host" : "guest"},
                   {"messages", t.messages},
                   {"bytes", t.bytes}});
  }
  return out;
}

void Endpoint::send(const PartyId& to, const Message& m) {
  Frame frame = encode_frame(m);
  ledger_->record(self_, m, frame.size());
  transport_->send(self_, to, std::move(frame));
}

Message Endpoint::receive(const PartyId& from) {
  return decode_frame(transport_->receive(self_, from));
}

std::optional<Message> Endpoint::try_receive(const PartyId& from) {
  auto frame = transport_->try_receive(self_, from);
  if (!frame) return std::nullopt;
  return decode_frame(*frame);
}

}  // namespace hybridtree
