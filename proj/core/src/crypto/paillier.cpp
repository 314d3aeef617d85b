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

#include <mutex>
#include <string>
#include <vector>

#include "hybridtree/common/error.hpp"
#include "hybridtree/crypto/cipher.hpp"
#include "sodium.hpp"

namespace hybridtree {
namespace {

constexpr int kWindowBits = 8;
constexpr std::size_t kWindowSize = 1u << kWindowBits;

mpz_class mulmod(const mpz_class& a, const mpz_class& b, const mpz_class& m) {
  mpz_class r = a * b;
  mpz_mod(r.get_mpz_t(), r.get_mpz_t(), m.get_mpz_t());
  return r;
}

mpz_class powmod(const mpz_class& b, const mpz_class& e, const mpz_class& m) {
  mpz_class r;
  mpz_powm(r.get_mpz_t(), b.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
  return r;
}

mpz_class invert(const mpz_class& a, const mpz_class& m) {
  mpz_class r;
  if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0) {
    throw CryptoError("value is not invertible modulo the key");
  }
  return r;
}

// base^e mod m for exponents below 2^(8 * windows), one multiplication per
// non-zero exponent byte.
class FixedBase {
 public:
  void build(const mpz_class& base, const mpz_class& mod, std::size_t exp_bits) {
    mod_ = mod;
    windows_ = (exp_bits + kWindowBits - 1) / kWindowBits;
    table_.assign(windows_ * kWindowSize, mpz_class(1));
    mpz_class cur = base % mod;
    for (std::size_t w = 0; w < windows_; ++w) {
      mpz_class* row = &table_[w * kWindowSize];
      row[1] = cur;
      for (std::size_t j = 2; j < kWindowSize; ++j) {
        row[j] = mulmod(row[j - 1], cur, mod_);
      }
      cur = mulmod(row[kWindowSize - 1], cur, mod_);
    }
  }

  mpz_class pow(const mpz_class& e) const {
    std::vector<unsigned char> bytes(windows_, 0);
    std::size_t count = 0;
    mpz_export(bytes.data(), &count, -1, 1, 0, 0, e.get_mpz_t());
    if (count > windows_) throw CryptoError("exponent exceeds the table");
    mpz_class r = 1;
    for (std::size_t w = 0; w < count; ++w) {
      if (bytes[w] != 0) r = mulmod(r, table_[w * kWindowSize + bytes[w]], mod_);
    }
    return r;
  }

 private:
  mpz_class mod_;
  std::size_t windows_ = 0;
  std::vector<mpz_class> table_;
};

// (x - 1) / d
mpz_class L(const mpz_class& x, const mpz_class& d) { return (x - 1) / d; }

}  // namespace

struct PaillierCipher::State {
  unsigned bits = 0;
  mpz_class n, n2;
  bool has_private = false;
  mpz_class p, q, p2, q2, hp, hq, p_inv_q, p2_inv_q2;
  std::size_t alpha_bits = 0;

  std::once_flag tables_once;
  FixedBase base_n2, base_p2, base_q2;

  void set_public(const mpz_class& modulus) {
    n = modulus;
    n2 = n * n;
    bits = static_cast<unsigned>(mpz_sizeinbase(n.get_mpz_t(), 2));
    alpha_bits = std::max<std::size_t>(32, bits / 2);
  }

  void set_private(const mpz_class& pp, const mpz_class& qq) {
    p = pp;
    q = qq;
    set_public(p * q);
    p2 = p * p;
    q2 = q * q;
    const mpz_class g = n + 1;
    hp = invert(L(powmod(g, p - 1, p2), p), p);
    hq = invert(L(powmod(g, q - 1, q2), q), q);
    p_inv_q = invert(p, q);
    p2_inv_q2 = invert(p2, q2);
    has_private = true;
  }

  // h_s = h^n mod n^2 for a random unit h.
  void build_tables() {
    mpz_class h;
    do {
      h = internal::random_bits(bits + 64) % n;
    } while (h < 2 || gcd(h, n) != 1);
    const mpz_class hs = powmod(h, n, n2);
    if (has_private) {
      base_p2.build(hs % p2, p2, alpha_bits);
      base_q2.build(hs % q2, q2, alpha_bits);
    } else {
      base_n2.build(hs, n2, alpha_bits);
    }
  }

  mpz_class randomizer() {
    std::call_once(tables_once, [this] { build_tables(); });
    const mpz_class a = internal::random_bits(alpha_bits);
    if (!has_private) return base_n2.pow(a);
    const mpz_class rp = base_p2.pow(a);
    const mpz_class rq = base_q2.pow(a);
    mpz_class t = (rq - rp) * p2_inv_q2;
    mpz_mod(t.get_mpz_t(), t.get_mpz_t(), q2.get_mpz_t());
    return rp + p2 * t;
  }
};

PaillierCipher::PaillierCipher(std::shared_ptr<State> state)
    : Cipher(state->n), state_(std::move(state)) {}

std::shared_ptr<PaillierCipher> PaillierCipher::generate(
    unsigned bits, std::optional<std::uint64_t> seed) {
  if (bits != 64 && bits != 512 && bits != 1024 && bits != 2048) {
    throw CryptoError("unsupported Paillier key size " + std::to_string(bits) +
                      " (expected 64, 512, 1024 or 2048)");
  }
  gmp_randclass rng(gmp_randinit_mt);
  if (seed) {
    rng.seed(*seed);
  } else {
    rng.seed(internal::random_bits(256));
  }
  const unsigned half = bits / 2;
  auto prime = [&]() {
    while (true) {
      mpz_class c = rng.get_z_bits(half);
      mpz_setbit(c.get_mpz_t(), half - 1);
      mpz_setbit(c.get_mpz_t(), half - 2);
      mpz_nextprime(c.get_mpz_t(), c.get_mpz_t());
      if (mpz_sizeinbase(c.get_mpz_t(), 2) == half) return c;
    }
  };
  while (true) {
    mpz_class p = prime(), q = prime();
    if (p == q) continue;
    const mpz_class n = p * q;
    if (mpz_sizeinbase(n.get_mpz_t(), 2) != bits) continue;
    if (gcd(n, (p - 1) * (q - 1)) != 1) continue;
    return from_private(p, q);
  }
}

std::shared_ptr<PaillierCipher> PaillierCipher::from_public(const mpz_class& n) {
  if (n < 15 || n % 2 == 0) throw CryptoError("invalid Paillier modulus");
  auto s = std::make_shared<State>();
  s->set_public(n);
  return std::make_shared<PaillierCipher>(s);
}

std::shared_ptr<PaillierCipher> PaillierCipher::from_private(const mpz_class& p,
                                                             const mpz_class& q) {
  if (p < 3 || q < 3 || p == q) throw CryptoError("invalid Paillier primes");
  auto s = std::make_shared<State>();
  s->set_private(p, q);
  return std::make_shared<PaillierCipher>(s);
}

std::string PaillierCipher::name() const {
  return "paillier-" + std::to_string(state_->bits);
}

bool PaillierCipher::can_decrypt() const { return state_->has_private; }

std::shared_ptr<const Cipher> PaillierCipher::public_view() const {
  return from_public(state_->n);
}

unsigned PaillierCipher::key_bits() const { return state_->bits; }
const mpz_class& PaillierCipher::n() const { return state_->n; }

const mpz_class& PaillierCipher::p() const {
  if (!state_->has_private) throw CryptoError("public-only Paillier key");
  return state_->p;
}

const mpz_class& PaillierCipher::q() const {
  if (!state_->has_private) throw CryptoError("public-only Paillier key");
  return state_->q;
}

mpz_class PaillierCipher::do_encrypt(const mpz_class& m) const {
  const State& s = *state_;
  mpz_class c = (1 + m * s.n) * state_->randomizer();
  mpz_mod(c.get_mpz_t(), c.get_mpz_t(), s.n2.get_mpz_t());
  return c;
}

mpz_class PaillierCipher::do_decrypt(const mpz_class& c) const {
  const State& s = *state_;
  const mpz_class mp = mulmod(L(powmod(c % s.p2, s.p - 1, s.p2), s.p), s.hp, s.p);
  const mpz_class mq = mulmod(L(powmod(c % s.q2, s.q - 1, s.q2), s.q), s.hq, s.q);
  mpz_class t = (mq - mp) * s.p_inv_q;
  mpz_mod(t.get_mpz_t(), t.get_mpz_t(), s.q.get_mpz_t());
  return mp + s.p * t;
}

mpz_class PaillierCipher::do_add(const mpz_class& a, const mpz_class& b) const {
  return mulmod(a, b, state_->n2);
}

mpz_class PaillierCipher::do_add_plain(const mpz_class& c,
                                       const mpz_class& m) const {
  return mulmod(c, 1 + m * state_->n, state_->n2);
}

mpz_class PaillierCipher::do_mul_plain(const mpz_class& c,
                                       const mpz_class& k) const {
  if (sgn(k) >= 0) return powmod(c, k, state_->n2);
  return powmod(invert(c, state_->n2), -k, state_->n2);
}

}  // namespace hybridtree
