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

#ifndef HYBRIDTREE_SRC_CRYPTO_SODIUM_HPP_
#define HYBRIDTREE_SRC_CRYPTO_SODIUM_HPP_

#include <cstddef>

#include <gmpxx.h>

namespace hybridtree::internal {

// Idempotent libsodium initialization; throws CryptoError on failure.
void ensure_sodium();

// Uniform integer with `bits` random bits from the system CSPRNG.
mpz_class random_bits(std::size_t bits);

}  // namespace hybridtree::internal

#endif  // HYBRIDTREE_SRC_CRYPTO_SODIUM_HPP_
