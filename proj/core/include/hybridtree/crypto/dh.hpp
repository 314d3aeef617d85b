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

#ifndef HYBRIDTREE_CRYPTO_DH_HPP_
#define HYBRIDTREE_CRYPTO_DH_HPP_

#include <array>
#include <cstdint>

namespace hybridtree {

using DhPublicKey = std::array<std::uint8_t, 32>;
using DhPrivateKey = std::array<std::uint8_t, 32>;
// 256-bit secret shared by one guest pair.
using SharedKey = std::array<std::uint8_t, 32>;

struct DhKeyPair {
  DhPublicKey public_key{};
  DhPrivateKey private_key{};
};

// X25519 key pair from the system CSPRNG.
DhKeyPair dh_keygen();

// X25519 agreement hashed with both public keys (in sorted order), so that
// dh_shared(a, B) == dh_shared(b, A). Rejects the identity and other
// low-order public values with CryptoError.
SharedKey dh_shared(const DhPrivateKey& mine, const DhPublicKey& theirs);

}  // namespace hybridtree

#endif  // HYBRIDTREE_CRYPTO_DH_HPP_
