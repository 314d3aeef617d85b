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

#include "hybridtree/crypto/dh.hpp"

#include <algorithm>

#include <sodium.h>

#include "hybridtree/common/error.hpp"
#include "sodium.hpp"

namespace hybridtree {

DhKeyPair dh_keygen() {
  internal::ensure_sodium();
  DhKeyPair kp;
  randombytes_buf(kp.private_key.data(), kp.private_key.size());
  crypto_scalarmult_base(kp.public_key.data(), kp.private_key.data());
  return kp;
}

SharedKey dh_shared(const DhPrivateKey& mine, const DhPublicKey& theirs) {
  internal::ensure_sodium();
  if (std::all_of(theirs.begin(), theirs.end(), [](auto b) { return b == 0; })) {
    throw CryptoError("rejected identity DH public value");
  }
  std::array<std::uint8_t, crypto_scalarmult_BYTES> point{};
  if (crypto_scalarmult(point.data(), mine.data(), theirs.data()) != 0) {
    throw CryptoError("rejected low-order DH public value");
  }
  DhPublicKey own{};
  crypto_scalarmult_base(own.data(), mine.data());
  const auto& lo = std::min(own, theirs);
  const auto& hi = std::max(own, theirs);

  SharedKey key{};
  crypto_generichash_state st;
  crypto_generichash_init(&st, nullptr, 0, key.size());
  crypto_generichash_update(&st, point.data(), point.size());
  crypto_generichash_update(&st, lo.data(), lo.size());
  crypto_generichash_update(&st, hi.data(), hi.size());
  crypto_generichash_final(&st, key.data(), key.size());
  sodium_memzero(point.data(), point.size());
  return key;
}

}  // namespace hybridtree
