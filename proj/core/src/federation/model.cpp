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

#include "hybridtree/federation/model.hpp"

#include <algorithm>
#include <map>
#include <tuple>
#include <utility>

#include "hybridtree/common/bytes.hpp"
#include "hybridtree/common/error.hpp"

namespace hybridtree {
namespace {

std::string mpz_hex(const mpz_class& v) { return v.get_str(16); }

mpz_class hex_mpz(const std::string& s) {
  mpz_class v;
  if (s.empty() || v.set_str(s, 16) != 0 || v < 0) {
    throw ValidationError("invalid hex integer \"" + s + "\"");
  }
  return v;
}

}  // namespace

std::string to_string(GuestSplitMode mode) {
  return mode == GuestSplitMode::kAssisted ? "assisted" : "surrogate";
}

GuestSplitMode parse_guest_split_mode(const std::string& name) {
  if (name == "assisted") return GuestSplitMode::kAssisted;
  if (name == "surrogate") return GuestSplitMode::kSurrogate;
  throw ConfigError("unknown guest split mode \"" + name +
                    "\" (expected assisted or surrogate)");
}

void HybridParams::validate() const {
  train.validate();
  if (host_depth < 1 || guest_depth < 1) {
    throw ConfigError("host and guest depths must be at least 1");
  }
  if (host_depth + guest_depth != train.max_depth) {
    throw ConfigError("host depth " + std::to_string(host_depth) +
                      " + guest depth " + std::to_string(guest_depth) +
                      " must equal total depth " +
                      std::to_string(train.max_depth));
  }
  if (frac_bits < 1 || frac_bits > 52 || leaf_frac_bits < 1 ||
      leaf_frac_bits > 60) {
    throw ConfigError("fixed-point fraction bits out of range");
  }
}

std::vector<BottomTree> DistributedModel::bottoms_of(std::uint32_t guest) const {
  std::vector<BottomTree> out;
  for (const BottomTree& b : guest_trees) {
    if (b.guest == guest) out.push_back(b);
  }
  return out;
}

Tree DistributedModel::plaintext(const BottomTree& bottom) const {
  if (!cipher || !cipher->can_decrypt()) {
    throw CryptoError("model has no private key to reveal leaf values");
  }
  const auto ids = bottom.tree.leaf_ids();
  if (ids.size() != bottom.leaf_values.size()) {
    throw ValidationError("bottom tree leaf count does not match its values");
  }
  std::map<NodeId, double> values;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    values[ids[i]] = cipher->decrypt_real(bottom.leaf_values[i]);
  }
  return bottom.tree.with_leaf_values(values);
}

Ensemble DistributedModel::stitched() const {
  std::vector<std::map<NodeId, Tree>> bottoms(host_trees.size());
  for (const BottomTree& b : guest_trees) {
    if (b.round >= host_trees.size()) {
      throw ValidationError("bottom tree round out of range");
    }
    if (!bottoms[b.round].emplace(b.node, plaintext(b)).second) {
      throw ValidationError("several guests cover round " +
                            std::to_string(b.round) + " node " +
                            std::to_string(b.node) + "; no single tree");
    }
  }
  Ensemble e;
  e.loss = loss;
  e.learning_rate = learning_rate;
  for (std::size_t t = 0; t < host_trees.size(); ++t) {
    e.trees.push_back(stitch(host_trees[t], bottoms[t]));
  }
  return e;
}

nlohmann::json cipher_to_json(const Cipher& cipher) {
  if (cipher.kind() == CipherKind::kPassthrough) {
    return {{"kind", "passthrough"},
            {"ring_bits", mpz_sizeinbase(
                              cipher.plaintext_modulus().get_mpz_t(), 2) - 1}};
  }
  const auto& p = dynamic_cast<const PaillierCipher&>(cipher);
  if (!p.can_decrypt()) {
    return {{"kind", "paillier"}, {"n", mpz_hex(p.n())}};
  }
  return {{"kind", "paillier"}, {"p", mpz_hex(p.p())}, {"q", mpz_hex(p.q())}};
}

std::shared_ptr<const Cipher> cipher_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "passthrough") {
    return std::make_shared<PassthroughCipher>(j.at("ring_bits").get<unsigned>());
  }
  if (kind == "paillier") {
    if (j.contains("p")) {
      return PaillierCipher::from_private(hex_mpz(j.at("p").get<std::string>()),
                                          hex_mpz(j.at("q").get<std::string>()));
    }
    return PaillierCipher::from_public(hex_mpz(j.at("n").get<std::string>()));
  }
  throw ValidationError("unknown cipher kind \"" + kind + "\"");
}

nlohmann::json DistributedModel::to_json() const {
  nlohmann::json host = nlohmann::json::array();
  for (const Tree& t : host_trees) host.push_back(t.to_json());
  nlohmann::json guests = nlohmann::json::array();
  for (const BottomTree& b : guest_trees) {
    nlohmann::json leaves = nlohmann::json::array();
    for (const Ciphertext& c : b.leaf_values) {
      leaves.push_back({{"c", mpz_hex(c.value)}, {"scale", c.scale}});
    }
    guests.push_back({{"guest", b.guest},
                      {"round", b.round},
                      {"node", b.node},
                      {"tree", b.tree.to_json()},
                      {"leaves", leaves}});
  }
  return {{"format", "hybridtree-distributed"},
          {"params",
           {{"loss", to_string(loss)},
            {"learning_rate", learning_rate},
            {"host_depth", host_depth},
            {"guest_depth", guest_depth},
            {"mode", to_string(mode)},
            {"n_guests", n_guests}}},
          {"host_trees", host},
          {"guest_trees", guests},
          {"key", cipher ? cipher_to_json(*cipher) : nlohmann::json()}};
}

DistributedModel DistributedModel::from_json(const nlohmann::json& j) {
  try {
    if (j.value("format", "") != "hybridtree-distributed") {
      throw ValidationError("not a distributed model document");
    }
    DistributedModel m;
    const auto& p = j.at("params");
    m.loss = parse_loss(p.at("loss").get<std::string>());
    m.learning_rate = p.at("learning_rate").get<double>();
    m.host_depth = p.at("host_depth").get<std::size_t>();
    m.guest_depth = p.at("guest_depth").get<std::size_t>();
    m.mode = parse_guest_split_mode(p.at("mode").get<std::string>());
    m.n_guests = p.at("n_guests").get<std::uint32_t>();
    for (const auto& t : j.at("host_trees")) {
      m.host_trees.push_back(Tree::from_json(t));
    }
    for (const auto& g : j.at("guest_trees")) {
      BottomTree b;
      b.guest = g.at("guest").get<std::uint32_t>();
      b.round = g.at("round").get<std::uint32_t>();
      b.node = g.at("node").get<NodeId>();
      b.tree = Tree::from_json(g.at("tree"));
      for (const auto& c : g.at("leaves")) {
        Ciphertext ct;
        ct.value = hex_mpz(c.at("c").get<std::string>());
        ct.scale = c.at("scale").get<std::int16_t>();
        b.leaf_values.push_back(std::move(ct));
      }
      if (b.leaf_values.size() != b.tree.num_leaves()) {
        throw ValidationError("bottom tree leaf count does not match values");
      }
      m.guest_trees.push_back(std::move(b));
    }
    std::sort(m.guest_trees.begin(), m.guest_trees.end(),
              [](const BottomTree& a, const BottomTree& b) {
                return std::tie(a.guest, a.round, a.node) <
                       std::tie(b.guest, b.round, b.node);
              });
    if (!j.at("key").is_null()) m.cipher = cipher_from_json(j.at("key"));
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed model: ") + e.what());
  }
}

}  // namespace hybridtree
