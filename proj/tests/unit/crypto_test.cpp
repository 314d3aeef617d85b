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

#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "hybridtree/common/bytes.hpp"
#include "hybridtree/common/error.hpp"
#include "hybridtree/common/types.hpp"
#include "hybridtree/crypto/cipher.hpp"
#include "hybridtree/crypto/dh.hpp"
#include "hybridtree/crypto/fixed_point.hpp"
#include "hybridtree/crypto/mask.hpp"

namespace hybridtree {
namespace {

mpz_class random_below(const mpz_class& n, Rng& rng) {
  mpz_class v = 0;
  const std::size_t words = mpz_sizeinbase(n.get_mpz_t(), 2) / 64 + 2;
  for (std::size_t i = 0; i < words; ++i) v = (v << 64) + mpz_class(std::to_string(rng()));
  return v % n;
}

class CipherContract : public ::testing::TestWithParam<std::string> {
 protected:
  std::shared_ptr<const Cipher> cipher() const {
    if (GetParam() == "passthrough") return std::make_shared<PassthroughCipher>();
    return PaillierCipher::generate(64, 7);
  }
};

TEST_P(CipherContract, RoundTripAndZero) {
  auto c = cipher();
  EXPECT_EQ(c->decrypt(c->encrypt(12345, 0)), 12345);
  EXPECT_EQ(c->decrypt(c->encrypt(0, 0)), 0);
  EXPECT_EQ(c->decrypt(c->encrypt(-77, 0)), -77);
}

TEST_P(CipherContract, AdditiveExamples) {
  auto c = cipher();
  EXPECT_EQ(c->decrypt(c->add(c->encrypt(3, 0), c->encrypt(4, 0))), 7);
  EXPECT_EQ(c->decrypt(c->add_plain(c->encrypt(3, 0), 9)), 12);
  EXPECT_EQ(c->decrypt(c->mul_plain(c->encrypt(5, 0), -2)), -10);
  EXPECT_EQ(c->decrypt(c->mul_plain(c->encrypt(-5, 0), 0)), 0);
}

TEST_P(CipherContract, RandomizedHomomorphismIsExact) {
  auto c = cipher();
  const mpz_class& n = c->plaintext_modulus();
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    mpz_class a = random_below(n, rng), b = random_below(n, rng);
    mpz_class k = random_below(n, rng);
    Ciphertext ea = c->encrypt_raw(a), eb = c->encrypt_raw(b);
    ASSERT_EQ(c->decrypt_raw(c->add(ea, eb)), mpz_class((a + b) % n));
    ASSERT_EQ(c->decrypt_raw(c->add_plain_raw(ea, b)), mpz_class((a + b) % n));
    ASSERT_EQ(c->decrypt_raw(c->mul_plain(ea, k)), mpz_class((a * k) % n));
  }
}

TEST_P(CipherContract, ScaleDiscipline) {
  auto c = cipher();
  Ciphertext a = c->encrypt_real(0.5, 24);
  Ciphertext b = c->encrypt_real(0.25, 20);
  EXPECT_THROW(c->add(a, b), CryptoError);
  Ciphertext k = c->mul_plain(a, c->codec().encode_signed(-0.5, 10), 10);
  EXPECT_EQ(k.scale, 34);
  EXPECT_EQ(c->decrypt_real(k), -0.25);
}

TEST_P(CipherContract, OverflowIsDetected) {
  auto c = cipher();
  const mpz_class& n = c->plaintext_modulus();
  EXPECT_THROW(c->encrypt(n, 0), OverflowError);
  EXPECT_THROW(c->encrypt_raw(n), CryptoError);
  Ciphertext big = c->encrypt(n / 8, 0);
  EXPECT_THROW(c->mul_plain(big, 16), OverflowError);
  EXPECT_THROW(c->add(c->add(big, big), c->add(big, big)), OverflowError);
  EXPECT_THROW(c->encrypt_real(std::ldexp(1.0, 300), 24), OverflowError);
}

TEST_P(CipherContract, WireRoundTrip) {
  auto c = cipher();
  Ciphertext e = c->encrypt_real(-1.5, 24);
  ByteWriter w;
  write_ciphertext(w, e);
  c->write_public_key(w);
  ByteReader r(w.data());
  Ciphertext back = read_ciphertext(r);
  auto pub = Cipher::read_public_key(r);
  r.expect_end();
  EXPECT_EQ(back, e);
  EXPECT_EQ(pub->plaintext_modulus(), c->plaintext_modulus());
  EXPECT_EQ(c->decrypt_real(pub->add(back, pub->encrypt_real(0.25, 24))), -1.25);
}

INSTANTIATE_TEST_SUITE_P(Ciphers, CipherContract,
                         ::testing::Values("paillier", "passthrough"));

TEST(Paillier, KeyGeneration) {
  auto a = PaillierCipher::generate(64);
  auto b = PaillierCipher::generate(64);
  EXPECT_NE(a->n(), b->n());
  EXPECT_EQ(mpz_sizeinbase(a->n().get_mpz_t(), 2), 64u);
  EXPECT_THROW(PaillierCipher::generate(100), CryptoError);
  EXPECT_EQ(PaillierCipher::generate(64, 3)->n(), PaillierCipher::generate(64, 3)->n());
}

TEST(Paillier, EncryptionIsRandomized) {
  auto c = PaillierCipher::generate(64, 1);
  Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    mpz_class m = random_below(c->n(), rng);
    Ciphertext x = c->encrypt_raw(m), y = c->encrypt_raw(m);
    EXPECT_NE(x.value, y.value);
    EXPECT_EQ(c->decrypt_raw(x), m);
    EXPECT_EQ(c->decrypt_raw(y), m);
  }
}

TEST(Paillier, MismatchedKeyGivesGarbage) {
  auto a = PaillierCipher::generate(64, 1);
  auto b = PaillierCipher::generate(64, 2);
  Rng rng(3);
  int differ = 0;
  for (int i = 0; i < 100; ++i) {
    mpz_class m = random_below(a->n(), rng);
    differ += b->decrypt_raw(a->encrypt_raw(m)) != m;
  }
  EXPECT_EQ(differ, 100);
}

TEST(Paillier, PublicViewCannotDecrypt) {
  auto c = PaillierCipher::generate(64, 1);
  auto pub = c->public_view();
  EXPECT_FALSE(pub->can_decrypt());
  Ciphertext e = pub->encrypt(42, 0);
  EXPECT_THROW(pub->decrypt(e), CryptoError);
  EXPECT_EQ(c->decrypt(e), 42);
}

TEST(Paillier, ProductionKeySizes) {
  for (unsigned bits : {512u, 1024u}) {
    auto c = PaillierCipher::generate(bits, 5);
    auto pub = c->public_view();
    EXPECT_EQ(c->key_bits(), bits);
    Ciphertext g = pub->encrypt_real(-0.375, 24);
    Ciphertext sum = pub->add(g, pub->encrypt_real(1.0, 24));
    mpz_class k = pub->codec().encode_signed(-1.0 / 3.0, 48);
    Ciphertext leaf = pub->mul_plain(sum, k, 48);
    EXPECT_EQ(leaf.scale, 72);
    EXPECT_NEAR(c->decrypt_real(leaf), -0.625 / 3.0, 1e-14);
  }
}

TEST(FixedPoint, Examples) {
  FixedPointCodec codec(PaillierCipher::generate(64, 1)->n());
  EXPECT_EQ(codec.encode(0.5), 8388608);
  EXPECT_EQ(codec.encode(0.0), 0);
  EXPECT_EQ(codec.decode(codec.encode(-1.25)), -1.25);
  Rng rng(4);
  std::uniform_real_distribution<double> u(-1000, 1000);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng);
    EXPECT_LE(std::abs(codec.decode(codec.encode(x)) - x), std::ldexp(1.0, -24));
  }
  EXPECT_THROW(codec.encode(std::ldexp(1.0, 60)), OverflowError);
  EXPECT_THROW(codec.encode(NAN), OverflowError);
}

TEST(Dh, SymmetryAndDistinctness) {
  std::vector<DhKeyPair> parties;
  for (int i = 0; i < 21; ++i) parties.push_back(dh_keygen());
  std::set<SharedKey> secrets;
  for (int i = 0; i < 20; ++i) {
    const auto& a = parties[i];
    const auto& b = parties[i + 1];
    SharedKey ab = dh_shared(a.private_key, b.public_key);
    EXPECT_EQ(ab, dh_shared(b.private_key, a.public_key));
    secrets.insert(ab);
  }
  EXPECT_EQ(secrets.size(), 20u);
  EXPECT_NE(dh_shared(parties[0].private_key, parties[1].public_key),
            dh_shared(parties[0].private_key, parties[2].public_key));
}

TEST(Dh, RejectsIdentityAndLowOrderPoints) {
  DhKeyPair a = dh_keygen();
  DhPublicKey zero{};
  EXPECT_THROW(dh_shared(a.private_key, zero), CryptoError);
  DhPublicKey one{};
  one[0] = 1;
  EXPECT_THROW(dh_shared(a.private_key, one), CryptoError);
}

struct Guests {
  std::vector<DhKeyPair> kp;
  std::vector<std::map<std::size_t, SharedKey>> keys;
  explicit Guests(std::size_t n) : kp(n), keys(n) {
    for (auto& k : kp) k = dh_keygen();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j) keys[i][j] = dh_shared(kp[i].private_key, kp[j].public_key);
      }
    }
  }
};

TEST(Masks, SymmetricDerivation) {
  Guests g(2);
  MaskContext ctx{3, 4, 5};
  const mpz_class n = mpz_class(1) << 256;
  EXPECT_EQ(mask_for(g.keys[0][1], ctx, n), mask_for(g.keys[1][0], ctx, n));
  EXPECT_NE(mask_for(g.keys[0][1], ctx, n),
            mask_for(g.keys[0][1], MaskContext{3, 4, 6}, n));
  EXPECT_EQ((signed_mask(g.keys[0][1], 0, 1, ctx, n) +
             signed_mask(g.keys[1][0], 1, 0, ctx, n)) % n, 0);
}

TEST(Masks, AggregateCancelsForAnyGroupSize) {
  auto cipher = PaillierCipher::generate(64, 9);
  Rng rng(5);
  for (std::size_t n_guests = 1; n_guests <= 10; ++n_guests) {
    Guests g(n_guests);
    std::vector<std::size_t> ids(n_guests);
    std::iota(ids.begin(), ids.end(), 0);
    for (int trial = 0; trial < 5; ++trial) {
      MaskContext ctx{static_cast<std::uint64_t>(trial), 1, 2};
      Ciphertext sum = cipher->encrypt(0, 24);
      mpz_class truth = 0;
      for (std::size_t i = 0; i < n_guests; ++i) {
        mpz_class v = static_cast<long>(rng() % 2000001) - 1000000;
        truth += v;
        Ciphertext masked =
            apply_masks(*cipher, cipher->encrypt(v, 24), i, ids, g.keys[i], ctx);
        if (n_guests == 1) EXPECT_EQ(cipher->decrypt(masked), v);
        sum = cipher->add(sum, masked);
      }
      EXPECT_EQ(cipher->decrypt(sum), truth);
    }
  }
}

TEST(Masks, DroppingAGuestBreaksCancellation) {
  auto cipher = std::make_shared<PassthroughCipher>();
  Guests g(4);
  std::vector<std::size_t> ids{0, 1, 2, 3};
  int broken = 0;
  for (std::uint64_t t = 0; t < 1000; ++t) {
    MaskContext ctx{t, 0, 0};
    Ciphertext sum = cipher->encrypt(0, 0);
    for (std::size_t i = 0; i + 1 < 4; ++i) {
      sum = cipher->add(sum, apply_masks(*cipher, cipher->encrypt(1, 0), i, ids,
                                         g.keys[i], ctx));
    }
    broken += cipher->decrypt_raw(sum) != 3;
  }
  EXPECT_GE(broken, 999);
}

TEST(Masks, MissingKeyIsError) {
  auto cipher = std::make_shared<PassthroughCipher>();
  Guests g(2);
  std::vector<std::size_t> ids{0, 1, 2};
  EXPECT_THROW(apply_masks(*cipher, cipher->encrypt(1, 0), 0, ids, g.keys[0], {}),
               CryptoError);
}

}  // namespace
}  // namespace hybridtree
