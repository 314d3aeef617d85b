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

#include "hybridtree/crypto/mask.hpp"

#include <array>
#include <string>
#include <vector>

#include <sodium.h>

#include "hybridtree/common/bytes.hpp"
#include "hybridtree/common/error.hpp"
#include "sodium.hpp"

namespace hybridtree {

mpz_class mask_for(const SharedKey& shared, const MaskContext& ctx,
                   const mpz_class& modulus) {
  internal::ensure_sodium();
  // 128 extra bits make the reduction mod n statistically uniform.
  const std::size_t need = (mpz_sizeinbase(modulus.get_mpz_t(), 2) + 128 + 7) / 8;
  std::vector<std::uint8_t> stream;
  stream.reserve(need + crypto_generichash_BYTES_MAX);
  for (std::uint32_t block = 0; stream.size() < need; ++block) {
    ByteWriter msg;
    msg.str("hybridtree-mask");
    msg.u64(ctx.round);
    msg.u64(ctx.node);
    msg.u64(ctx.slot);
    msg.u32(block);
    std::array<std::uint8_t, crypto_generichash_BYTES_MAX> out{};
    crypto_generichash(out.data(), out.size(), msg.data().data(),
                       msg.data().size(), shared.data(), shared.size());
    stream.insert(stream.end(), out.begin(), out.end());
  }
  mpz_class v;
  mpz_import(v.get_mpz_t(), need, 1, 1, 1, 0, stream.data());
  mpz_mod(v.get_mpz_t(), v.get_mpz_t(), modulus.get_mpz_t());
  return v;
}

mpz_class signed_mask(const SharedKey& shared, std::size_t mine,
                      std::size_t peer, const MaskContext& ctx,
                      const mpz_class& modulus) {
  mpz_class m = mask_for(shared, ctx, modulus);
  if (mine < peer || sgn(m) == 0) return m;
  return modulus - m;
}

Ciphertext apply_masks(const Cipher& cipher, const Ciphertext& c,
                       std::size_t mine, std::span<const std::size_t> peers,
                       const std::map<std::size_t, SharedKey>& keys,
                       const MaskContext& ctx) {
  mpz_class total = 0;
  const mpz_class& n = cipher.plaintext_modulus();
  bool any = false;
  for (std::size_t peer : peers) {
    if (peer == mine) continue;
    auto it = keys.find(peer);
    if (it == keys.end()) {
      throw CryptoError("no shared key with guest " + std::to_string(peer));
    }
    total += signed_mask(it->second, mine, peer, ctx, n);
    any = true;
  }
  if (!any) return c;
  return cipher.add_plain_raw(c, total);
}

}  // namespace hybridtree
