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

#ifndef HYBRIDTREE_CRYPTO_FIXED_POINT_HPP_
#define HYBRIDTREE_CRYPTO_FIXED_POINT_HPP_

#include <gmpxx.h>

namespace hybridtree {

inline constexpr int kDefaultFracBits = 24;

// Signed fixed-point embedding of reals into Z_n: x -> round(x * 2^f) mod n,
// with values above n/2 read back as negative.
class FixedPointCodec {
 public:
  explicit FixedPointCodec(mpz_class modulus, int frac_bits = kDefaultFracBits);

  const mpz_class& modulus() const { return modulus_; }
  int frac_bits() const { return frac_bits_; }

  // round(x * 2^frac_bits) as a signed integer. Throws OverflowError unless
  // the result lies strictly inside (-n/2, n/2).
  mpz_class encode_signed(double x, int frac_bits) const;
  mpz_class encode(double x) const { return encode(x, frac_bits_); }
  mpz_class encode(double x, int frac_bits) const {
    return to_ring(encode_signed(x, frac_bits));
  }
  // Ring element at fixed-point scale 2^scale back to a real.
  double decode(const mpz_class& e, int scale) const;
  double decode(const mpz_class& e) const { return decode(e, frac_bits_); }

  mpz_class to_ring(const mpz_class& v) const;
  mpz_class to_signed(const mpz_class& e) const;
  // True when |v| < n/2.
  bool fits(const mpz_class& v) const;

 private:
  mpz_class modulus_;
  mpz_class half_;
  int frac_bits_;
};

}  // namespace hybridtree

#endif  // HYBRIDTREE_CRYPTO_FIXED_POINT_HPP_
