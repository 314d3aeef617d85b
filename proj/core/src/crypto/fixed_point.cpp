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

#include "hybridtree/crypto/fixed_point.hpp"

#include <cmath>
#include <string>

#include "hybridtree/common/error.hpp"

namespace hybridtree {

FixedPointCodec::FixedPointCodec(mpz_class modulus, int frac_bits)
    : modulus_(std::move(modulus)), half_(modulus_ / 2), frac_bits_(frac_bits) {
  if (modulus_ < 2) throw CryptoError("plaintext modulus must exceed 1");
  if (frac_bits < 0) throw CryptoError("fractional bits must be non-negative");
}

mpz_class FixedPointCodec::encode_signed(double x, int frac_bits) const {
  if (!std::isfinite(x)) throw OverflowError("cannot encode a non-finite value");
  const double scaled = std::nearbyint(std::ldexp(x, frac_bits));
  mpz_class v;
  mpz_set_d(v.get_mpz_t(), scaled);
  if (!fits(v)) {
    throw OverflowError("value " + std::to_string(x) + " at 2^" +
                        std::to_string(frac_bits) +
                        " exceeds the plaintext ring");
  }
  return v;
}

double FixedPointCodec::decode(const mpz_class& e, int scale) const {
  mpz_class s = to_signed(e);
  return std::ldexp(mpz_get_d(s.get_mpz_t()), -scale);
}

mpz_class FixedPointCodec::to_ring(const mpz_class& v) const {
  mpz_class r;
  mpz_fdiv_r(r.get_mpz_t(), v.get_mpz_t(), modulus_.get_mpz_t());
  return r;
}

mpz_class FixedPointCodec::to_signed(const mpz_class& e) const {
  mpz_class r = to_ring(e);
  if (r > half_) r -= modulus_;
  return r;
}

bool FixedPointCodec::fits(const mpz_class& v) const {
  return abs(v) < half_;
}

}  // namespace hybridtree
