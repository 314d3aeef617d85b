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

#include "hybridtree/crypto/cipher.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <sodium.h>

#include "hybridtree/common/error.hpp"
#include "sodium.hpp"

namespace hybridtree {
namespace internal {

void ensure_sodium() {
  static const int status = sodium_init();
  if (status < 0) throw CryptoError("libsodium initialization failed");
}

mpz_class random_bits(std::size_t bits) {
  ensure_sodium();
  std::vector<unsigned char> buf((bits + 7) / 8);
  randombytes_buf(buf.data(), buf.size());
  if (bits % 8) buf[0] &= static_cast<unsigned char>((1u << (bits % 8)) - 1);
  mpz_class v;
  mpz_import(v.get_mpz_t(), buf.size(), 1, 1, 1, 0, buf.data());
  return v;
}

}  // namespace internal

namespace {

double log2_abs(const mpz_class& v) {
  if (sgn(v) == 0) return -INFINITY;
  long exp = 0;
  const double mant = mpz_get_d_2exp(&exp, v.get_mpz_t());
  return std::log2(std::abs(mant)) + static_cast<double>(exp);
}

// log2(2^a + 2^b), NaN-propagating.
double log2_sum(double a, double b) {
  if (std::isnan(a) || std::isnan(b)) return NAN;
  if (a == -INFINITY) return b;
  if (b == -INFINITY) return a;
  const double hi = std::max(a, b), lo = std::min(a, b);
  return hi + std::log2(1.0 + std::exp2(lo - hi));
}

std::int16_t checked_scale(int scale) {
  if (scale < INT16_MIN || scale > INT16_MAX) {
    throw CryptoError("fixed-point scale out of range");
  }
  return static_cast<std::int16_t>(scale);
}

}  // namespace

void write_ciphertext(ByteWriter& w, const Ciphertext& c) {
  w.mpz(c.value);
  w.i16(c.scale);
}

Ciphertext read_ciphertext(ByteReader& r) {
  Ciphertext c;
  c.value = r.mpz();
  c.scale = r.i16();
  return c;
}

Cipher::Cipher(mpz_class modulus)
    : codec_(std::move(modulus)),
      modulus_bits_(mpz_sizeinbase(codec_.modulus().get_mpz_t(), 2)) {}

void Cipher::check_bound(double log2_bound, const char* op) const {
  if (std::isnan(log2_bound)) return;
  if (log2_bound >= static_cast<double>(modulus_bits_) - 2) {
    throw OverflowError(std::string(op) + " result may exceed the " +
                        std::to_string(modulus_bits_) +
                        "-bit plaintext ring (bound 2^" +
                        std::to_string(log2_bound) + ")");
  }
}

Ciphertext Cipher::encrypt_raw(const mpz_class& m, int scale) const {
  if (sgn(m) < 0 || m >= plaintext_modulus()) {
    throw CryptoError("plaintext outside the ring");
  }
  return {do_encrypt(m), checked_scale(scale), NAN};
}

Ciphertext Cipher::encrypt(const mpz_class& m, int scale) const {
  if (!codec_.fits(m)) throw OverflowError("plaintext outside (-n/2, n/2)");
  return {do_encrypt(codec_.to_ring(m)), checked_scale(scale), log2_abs(m)};
}

Ciphertext Cipher::encrypt_real(double x, int frac_bits) const {
  return encrypt(codec_.encode_signed(x, frac_bits), frac_bits);
}

mpz_class Cipher::decrypt_raw(const Ciphertext& c) const {
  if (!can_decrypt()) throw CryptoError("no private key for decryption");
  return do_decrypt(c.value);
}

mpz_class Cipher::decrypt(const Ciphertext& c) const {
  return codec_.to_signed(decrypt_raw(c));
}

double Cipher::decrypt_real(const Ciphertext& c) const {
  return codec_.decode(decrypt_raw(c), c.scale);
}

Ciphertext Cipher::add(const Ciphertext& a, const Ciphertext& b) const {
  if (a.scale != b.scale) {
    throw CryptoError("scale mismatch: 2^" + std::to_string(a.scale) +
                      " vs 2^" + std::to_string(b.scale));
  }
  const double bound = log2_sum(a.log2_bound, b.log2_bound);
  check_bound(bound, "add");
  return {do_add(a.value, b.value), a.scale, bound};
}

Ciphertext Cipher::add_plain(const Ciphertext& c, const mpz_class& m) const {
  const double bound = log2_sum(c.log2_bound, log2_abs(m));
  check_bound(bound, "add_plain");
  return {do_add_plain(c.value, codec_.to_ring(m)), c.scale, bound};
}

Ciphertext Cipher::add_plain_raw(const Ciphertext& c, const mpz_class& m) const {
  return {do_add_plain(c.value, codec_.to_ring(m)), c.scale, NAN};
}

Ciphertext Cipher::mul_plain(const Ciphertext& c, const mpz_class& k,
                             int k_scale) const {
  const double bound = std::isnan(c.log2_bound) ? NAN
                       : sgn(k) == 0            ? -INFINITY
                                                : c.log2_bound + log2_abs(k);
  check_bound(bound, "mul_plain");
  return {do_mul_plain(c.value, k), checked_scale(c.scale + k_scale), bound};
}

void Cipher::write_public_key(ByteWriter& w) const {
  w.u8(static_cast<std::uint8_t>(kind()));
  w.mpz(plaintext_modulus());
}

std::shared_ptr<const Cipher> Cipher::read_public_key(ByteReader& r) {
  const auto kind = static_cast<CipherKind>(r.u8());
  mpz_class n = r.mpz();
  switch (kind) {
    case CipherKind::kPassthrough: {
      const std::size_t bits = mpz_sizeinbase(n.get_mpz_t(), 2) - 1;
      if (n != mpz_class(1) << bits) {
        throw ProtocolError("passthrough ring must be a power of two");
      }
      return std::make_shared<PassthroughCipher>(static_cast<unsigned>(bits));
    }
    case CipherKind::kPaillier:
      return PaillierCipher::from_public(n);
  }
  throw ProtocolError("unknown cipher kind");
}

PassthroughCipher::PassthroughCipher(unsigned ring_bits)
    : Cipher(mpz_class(1) << ring_bits), ring_bits_(ring_bits) {}

std::shared_ptr<const Cipher> PassthroughCipher::public_view() const {
  return std::make_shared<PassthroughCipher>(ring_bits_);
}

mpz_class PassthroughCipher::do_add(const mpz_class& a,
                                    const mpz_class& b) const {
  mpz_class r = a + b;
  mpz_fdiv_r_2exp(r.get_mpz_t(), r.get_mpz_t(), ring_bits_);
  return r;
}

mpz_class PassthroughCipher::do_add_plain(const mpz_class& c,
                                          const mpz_class& m) const {
  return do_add(c, m);
}

mpz_class PassthroughCipher::do_mul_plain(const mpz_class& c,
                                          const mpz_class& k) const {
  mpz_class r = c * k;
  mpz_fdiv_r_2exp(r.get_mpz_t(), r.get_mpz_t(), ring_bits_);
  return r;
}

std::shared_ptr<const Cipher> make_cipher(const std::string& name,
                                          unsigned key_bits,
                                          std::optional<std::uint64_t> seed) {
  if (name == "passthrough") return std::make_shared<PassthroughCipher>();
  if (name == "paillier") return PaillierCipher::generate(key_bits, seed);
  throw ConfigError("unknown cipher \"" + name +
                    "\" (expected paillier or passthrough)");
}

}  // namespace hybridtree
