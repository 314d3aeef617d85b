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

#ifndef HYBRIDTREE_FEDERATION_MODEL_HPP_
#define HYBRIDTREE_FEDERATION_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hybridtree/crypto/cipher.hpp"
#include "hybridtree/gbdt/ensemble.hpp"
#include "hybridtree/gbdt/tree.hpp"

namespace hybridtree {

// How guests pick bottom-layer splits without seeing labels.
enum class GuestSplitMode {
  // Per layer, the host decrypts per-candidate gradient sums and returns the
  // gain argmax.
  kAssisted,
  // Guests maximize |I_L| * |I_R| locally; no extra messages.
  kSurrogate,
};

std::string to_string(GuestSplitMode mode);
GuestSplitMode parse_guest_split_mode(const std::string& name);

inline constexpr int kLeafMultiplierFracBits = 48;

struct HybridParams {
  // n_trees, lambda, learning_rate, max_bins and loss apply as in
  // centralized training; max_depth must equal host_depth + guest_depth.
  TrainParams train;
  // Split layers trained by the host; its last-layer nodes sit below them.
  std::size_t host_depth = 5;
  // Layers of each guest bottom tree, inclusive of its leaf layer.
  std::size_t guest_depth = 2;
  GuestSplitMode mode = GuestSplitMode::kAssisted;
  int frac_bits = kDefaultFracBits;
  int leaf_frac_bits = kLeafMultiplierFracBits;

  // Throws ConfigError.
  void validate() const;
};

// A guest's bottom tree under one host last-layer node. Leaf values stay
// encrypted under the host key; `leaf_values` follows tree.leaf_ids().
struct BottomTree {
  std::uint32_t guest = 0;
  std::uint32_t round = 0;
  NodeId node = 0;
  Tree tree;
  std::vector<Ciphertext> leaf_values;
};

// Every party's share of a trained model, bundled for persistence. The host
// trees carry the fallback leaf values for instances no guest covers. The
// bundle holds the host key pair, so it is a simulation artifact and must
// not be handed to guests.
struct DistributedModel {
  LossKind loss = LossKind::kLogistic;
  double learning_rate = 0.1;
  std::size_t host_depth = 5;
  std::size_t guest_depth = 2;
  GuestSplitMode mode = GuestSplitMode::kAssisted;
  std::uint32_t n_guests = 0;
  std::vector<Tree> host_trees;
  // Sorted by (guest, round, node).
  std::vector<BottomTree> guest_trees;
  std::shared_ptr<const Cipher> cipher;

  std::size_t n_trees() const { return host_trees.size(); }
  std::vector<BottomTree> bottoms_of(std::uint32_t guest) const;
  // Bottom tree with leaf values decrypted by the host key.
  Tree plaintext(const BottomTree& bottom) const;
  // Host trees with each covered last-layer node replaced by its bottom
  // tree. Throws ValidationError when some node has several bottom trees.
  Ensemble stitched() const;

  // {params, host_trees, guest_trees, key}. Ciphertexts as hex.
  nlohmann::json to_json() const;
  static DistributedModel from_json(const nlohmann::json& j);
};

nlohmann::json cipher_to_json(const Cipher& cipher);
std::shared_ptr<const Cipher> cipher_from_json(const nlohmann::json& j);

}  // namespace hybridtree

#endif  // HYBRIDTREE_FEDERATION_MODEL_HPP_
