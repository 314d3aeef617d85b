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

#ifndef HYBRIDTREE_CRYPTO_MASK_HPP_
#define HYBRIDTREE_CRYPTO_MASK_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>

#include <gmpxx.h>

#include "hybridtree/crypto/cipher.hpp"
#include "hybridtree/crypto/dh.hpp"

namespace hybridtree {

struct MaskContext {
  std::uint64_t round = 0;
  std::uint64_t node = 0;
  std::uint64_t slot = 0;
};

// Uniform element of [0, modulus) from a BLAKE2b-keyed PRF over the context.
// Both members of a guest pair derive the same value.
mpz_class mask_for(const SharedKey& shared, const MaskContext& ctx,
                   const mpz_class& modulus);

// What guest `mine` adds for peer `peer`: +mask when mine < peer, -mask
// otherwise, as a ring element.
mpz_class signed_mask(const SharedKey& shared, std::size_t mine,
                      std::size_t peer, const MaskContext& ctx,
                      const mpz_class& modulus);

// Adds the pairwise masks of guest `mine` toward every guest in `peers`
// (skipping `mine` itself). Throws CryptoError when a peer has no key.
Ciphertext apply_masks(const Cipher& cipher, const Ciphertext& c,
                       std::size_t mine, std::span<const std::size_t> peers,
                       const std::map<std::size_t, SharedKey>& keys,
                       const MaskContext& ctx);

}  // namespace hybridtree

#endif  // HYBRIDTREE_CRYPTO_MASK_HPP_
