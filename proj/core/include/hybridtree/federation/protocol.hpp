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

#ifndef HYBRIDTREE_FEDERATION_PROTOCOL_HPP_
#define HYBRIDTREE_FEDERATION_PROTOCOL_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hybridtree/crypto/cipher.hpp"
#include "hybridtree/data/dataset.hpp"
#include "hybridtree/federation/model.hpp"
#include "hybridtree/federation/transport.hpp"

namespace hybridtree {

// How guest parties are scheduled. Both produce identical results.
enum class Execution {
  // Guests run on the caller's thread whenever the host waits.
  kSequential,
  // One thread per guest.
  kThreaded,
};

std::string to_string(Execution execution);
Execution parse_execution(const std::string& name);

struct FederationOptions {
  // Host key pair; a passthrough cipher when unset.
  std::shared_ptr<const Cipher> cipher;
  Execution execution = Execution::kSequential;
  // Shared with the caller so traffic stays inspectable afterwards.
  std::shared_ptr<CommLedger> ledger;
  // Receives non-fatal diagnostics, such as excluded guests.
  std::function<void(const std::string&)> warn;
  // Called after every round with the host's prediction vector.
  std::function<void(std::size_t round, std::span<const double> y_p)>
      on_round;
};

// Per-party CPU seconds spent in protocol work.
struct PartyTimes {
  double host = 0;
  std::vector<double> guests;
};

// Lowest guest index among the holders. Throws ValidationError when empty.
std::uint32_t assign_responsible_guest(std::span<const std::uint32_t> holders);

// One host and its guests wired over an in-process transport: the host key
// is announced, guests exchange DH values through the host, and every guest
// pair derives a shared key. Guests sharing no instance with the host are
// excluded with a warning. Instance linkage by id is assumed done.
class Federation {
 public:
  Federation(const Dataset& host, std::span<const Dataset> guests,
             const HybridParams& params, FederationOptions options = {});
  ~Federation();
  Federation(const Federation&) = delete;
  Federation& operator=(const Federation&) = delete;

  // Runs every boosting round. May be called once.
  DistributedModel train();

  const CommLedger& ledger() const;
  std::shared_ptr<CommLedger> shared_ledger() const;
  // Guests taking part, ascending.
  std::vector<std::uint32_t> active_guests() const;
  // Number of unordered guest pairs holding a shared key.
  std::size_t pairwise_keys() const;
  const std::vector<std::string>& warnings() const;
  PartyTimes times() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

DistributedModel hybridtree_train(const Dataset& host,
                                  std::span<const Dataset> guests,
                                  const HybridParams& params,
                                  FederationOptions options = {});

struct PredictOptions {
  Execution execution = Execution::kSequential;
  std::shared_ptr<CommLedger> ledger;
  // Inference batch number recorded in the ledger.
  std::uint64_t batch = 0;
};

// Collaborative inference over the host's instances. Per tree the host
// routes each instance to a last-layer node and tells holding guests; each
// guest with a bottom tree there returns the encrypted leaf value; the host
// averages what it receives, or uses the fallback leaf. Returns raw scores
// in host row order.
std::vector<double> hybridtree_predict_raw(const DistributedModel& model,
                                           const Dataset& host,
                                           std::span<const Dataset> guests,
                                           const PredictOptions& options = {});

// Raw scores mapped through the loss (sigmoid for logistic).
std::vector<double> hybridtree_predict(const DistributedModel& model,
                                       const Dataset& host,
                                       std::span<const Dataset> guests,
                                       const PredictOptions& options = {});

}  // namespace hybridtree

#endif  // HYBRIDTREE_FEDERATION_PROTOCOL_HPP_
