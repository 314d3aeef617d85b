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

#ifndef HYBRIDTREE_CRYPTO_CIPHER_HPP_
#define HYBRIDTREE_CRYPTO_CIPHER_HPP_

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>

#include <gmpxx.h>

#include "hybridtree/common/bytes.hpp"
#include "hybridtree/crypto/fixed_point.hpp"

namespace hybridtree {

struct Ciphertext {
  mpz_class value;
  // Fixed-point scale 2^scale of the encrypted plaintext.
  std::int16_t scale = 0;
  // log2 of an upper bound on |plaintext| read as a signed integer; NaN when
  // untracked (raw ring values, masked values, data off the wire). Not part
  // of the wire format.
  double log2_bound = std::numeric_limits<double>::quiet_NaN();

  bool operator==(const Ciphertext& o) const {
    return value == o.value && scale == o.scale;
  }
};

// u32 length, big-endian value bytes, i16 scale.
void write_ciphertext(ByteWriter& w, const Ciphertext& c);
Ciphertext read_ciphertext(ByteReader& r);

enum class CipherKind : std::uint8_t { kPassthrough = 0, kPaillier = 1 };

// Additively homomorphic encryption over Z_n with fixed-point scale
// tracking. Operations on ciphertexts check scales and, where bounds are
// tracked, that the plaintext stays inside the signed embedding. Instances
// are immutable and safe for concurrent use.
class Cipher {
 public:
  virtual ~Cipher() = default;

  virtual CipherKind kind() const = 0;
  virtual std::string name() const = 0;
  virtual bool can_decrypt() const = 0;
  // Same scheme and public parameters without private material.
  virtual std::shared_ptr<const Cipher> public_view() const = 0;

  const mpz_class& plaintext_modulus() const { return codec_.modulus(); }
  const FixedPointCodec& codec() const { return codec_; }

  // Ring element m in [0, n); the bound is left untracked.
  Ciphertext encrypt_raw(const mpz_class& m, int scale = 0) const;
  // Signed integer with |m| < n/2.
  Ciphertext encrypt(const mpz_class& m, int scale) const;
  Ciphertext encrypt_real(double x, int frac_bits = kDefaultFracBits) const;

  mpz_class decrypt_raw(const Ciphertext& c) const;
  mpz_class decrypt(const Ciphertext& c) const;
  double decrypt_real(const Ciphertext& c) const;

  Ciphertext add(const Ciphertext& a, const Ciphertext& b) const;
  // Adds a signed plaintext at the ciphertext's scale.
  Ciphertext add_plain(const Ciphertext& c, const mpz_class& m) const;
  // Adds a ring element; the bound becomes untracked.
  Ciphertext add_plain_raw(const Ciphertext& c, const mpz_class& m) const;
  // Multiplies by a signed integer k that encodes a real at scale
  // 2^k_scale; the result scale is c.scale + k_scale.
  Ciphertext mul_plain(const Ciphertext& c, const mpz_class& k,
                       int k_scale = 0) const;

  // Kind byte, then the length-prefixed modulus.
  void write_public_key(ByteWriter& w) const;
  static std::shared_ptr<const Cipher> read_public_key(ByteReader& r);

 protected:
  explicit Cipher(mpz_class modulus);

  virtual mpz_class do_encrypt(const mpz_class& m) const = 0;
  virtual mpz_class do_decrypt(const mpz_class& c) const = 0;
  virtual mpz_class do_add(const mpz_class& a, const mpz_class& b) const = 0;
  virtual mpz_class do_add_plain(const mpz_class& c, const mpz_class& m) const = 0;
  virtual mpz_class do_mul_plain(const mpz_class& c, const mpz_class& k) const = 0;

 private:
  void check_bound(double log2_bound, const char* op) const;

  FixedPointCodec codec_;
  std::size_t modulus_bits_;
};

// Test double: Enc is the identity on Z_{2^ring_bits}.
class PassthroughCipher : public Cipher {
 public:
  explicit PassthroughCipher(unsigned ring_bits = 256);

  CipherKind kind() const override { return CipherKind::kPassthrough; }
  std::string name() const override { return "passthrough"; }
  bool can_decrypt() const override { return true; }
  std::shared_ptr<const Cipher> public_view() const override;

 protected:
  mpz_class do_encrypt(const mpz_class& m) const override { return m; }
  mpz_class do_decrypt(const mpz_class& c) const override { return c; }
  mpz_class do_add(const mpz_class& a, const mpz_class& b) const override;
  mpz_class do_add_plain(const mpz_class& c, const mpz_class& m) const override;
  mpz_class do_mul_plain(const mpz_class& c, const mpz_class& k) const override;

 private:
  unsigned ring_bits_;
};

// Paillier with g = n + 1. Encryption randomness is h_s^a mod n^2 for a fixed
// n-th residue h_s and a fresh random exponent a, computed with fixed-base
// window tables (modulo p^2 and q^2 when the factorization is known).
class PaillierCipher : public Cipher {
 public:
  // bits in {64 (test only), 512, 1024, 2048}. A seed makes the key
  // reproducible; otherwise the system CSPRNG is used.
  static std::shared_ptr<PaillierCipher> generate(
      unsigned bits, std::optional<std::uint64_t> seed = std::nullopt);
  static std::shared_ptr<PaillierCipher> from_public(const mpz_class& n);
  static std::shared_ptr<PaillierCipher> from_private(const mpz_class& p,
                                                      const mpz_class& q);

  CipherKind kind() const override { return CipherKind::kPaillier; }
  std::string name() const override;
  bool can_decrypt() const override;
  std::shared_ptr<const Cipher> public_view() const override;

  unsigned key_bits() const;
  const mpz_class& n() const;
  // Throws CryptoError for a public-only key.
  const mpz_class& p() const;
  const mpz_class& q() const;

  struct State;
  explicit PaillierCipher(std::shared_ptr<State> state);

 protected:
  mpz_class do_encrypt(const mpz_class& m) const override;
  mpz_class do_decrypt(const mpz_class& c) const override;
  mpz_class do_add(const mpz_class& a, const mpz_class& b) const override;
  mpz_class do_add_plain(const mpz_class& c, const mpz_class& m) const override;
  mpz_class do_mul_plain(const mpz_class& c, const mpz_class& k) const override;

 private:
  std::shared_ptr<State> state_;
};

// Cipher by name: "passthrough" or "paillier" (key_bits used for the latter).
std::shared_ptr<const Cipher> make_cipher(
    const std::string& name, unsigned key_bits,
    std::optional<std::uint64_t> seed = std::nullopt);

}  // namespace hybridtree

#endif  // HYBRIDTREE_CRYPTO_CIPHER_HPP_
