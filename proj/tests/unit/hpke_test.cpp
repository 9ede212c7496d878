#include <doctest.h>

#include "odoh/crypto/hpke.hpp"
#include "odoh/error.hpp"

using namespace odoh;

namespace {

struct Vector {
  std::uint16_t kem, kdf, aead;
  const char* sk_r;
  const char* pk_r;
  const char* sk_e;
  const char* pk_e;
  const char* info;
  const char* aad;
  const char* pt;
  const char* enc;
  const char* ct;
};

// Produced by tests/oracles/gen_hpke_vectors.py with pyhpke.
const Vector kOracleVectors[] = {
#include "../oracles/hpke_vectors.inc"
};

}  // namespace

TEST_SUITE("hpke") {

TEST_CASE("RFC 9180 A.1 base-mode vector, sequence 0") {
  const CipherSuite suite{kem::kX25519, kdf::kHkdfSha256, aead::kAes128Gcm};
  auto pk_r = from_hex("3948cfe0ad1ddb695d780e59077195da6c56506b027329794ab02bca80815c4d");
  auto sk_r = from_hex("4612c550263fc8ad58375df3f557aac531d26850903e55a9f23f21d8534e8ac8");
  auto sk_e = from_hex("52c4a758a802cd8b936eceea314432798d5baf2d7e9235dc084ab1b9cfa2f736");
  auto pk_e = from_hex("37fda3567bdbd628e88668c3c8d7e97d1d1253b6d4ea6d44c150f741f1bf4431");
  auto info = from_hex("4f6465206f6e2061204772656369616e2055726e");
  auto aad = from_hex("436f756e742d30");
  auto pt = from_hex("4265617574792069732074727574682c20747275746820626561757479");
  auto expected = from_hex(
      "f938558b5d72f1a23810b4be2ab4f84331acc02fc97babc53a52ae8218a355a96d8770ac83d07bea87e13c512a");

  auto sealed = hpke::detail::seal_with_ephemeral(suite, pk_r, sk_e, pk_e, info, aad, pt);
  CHECK(sealed.enc == pk_e);
  CHECK(to_hex(sealed.ciphertext) == to_hex(expected));
  CHECK(hpke::open(suite, sk_r, pk_r, sealed.enc, info, aad, expected) == pt);
}

TEST_CASE("matches the independent oracle for every registered suite") {
  for (const auto& v : kOracleVectors) {
    const CipherSuite suite{v.kem, v.kdf, v.aead};
    CAPTURE(suite.name());
    auto sealed = hpke::detail::seal_with_ephemeral(suite, from_hex(v.pk_r), from_hex(v.sk_e), from_hex(v.pk_e),
                                                    from_hex(v.info), from_hex(v.aad), from_hex(v.pt));
    CHECK(to_hex(sealed.enc) == v.enc);
    CHECK(to_hex(sealed.ciphertext) == v.ct);
    auto opened = hpke::open(suite, from_hex(v.sk_r), from_hex(v.pk_r), from_hex(v.enc), from_hex(v.info),
                             from_hex(v.aad), from_hex(v.ct));
    CHECK(to_hex(opened) == v.pt);
  }
  CHECK(std::size(kOracleVectors) == 36);
}

TEST_CASE("generated key pairs have registry sizes and validate") {
  struct Expect {
    std::uint16_t kem;
    std::size_t sk, pk;
  };
  for (auto e : {Expect{kem::kP256, 32, 65}, Expect{kem::kP521, 66, 133}, Expect{kem::kX25519, 32, 32},
                 Expect{kem::kX448, 56, 56}}) {
    auto kp = hpke::generate_key_pair(e.kem);
    CHECK(kp.secret_key.size() == e.sk);
    CHECK(kp.public_key.size() == e.pk);
    CHECK_NOTHROW(hpke::check_key_pair(e.kem, kp.secret_key.view(), kp.public_key));
    auto other = hpke::generate_key_pair(e.kem);
    CHECK_THROWS_AS(hpke::check_key_pair(e.kem, kp.secret_key.view(), other.public_key), Error);
  }
  CHECK(hpke::generate_key_pair(kem::kP256).public_key[0] == 0x04);
}

TEST_CASE("open rejects a wrong recipient key") {
  const auto suite = CipherSuite::default_suite();
  auto a = hpke::generate_key_pair(suite.kem_id);
  auto b = hpke::generate_key_pair(suite.kem_id);
  auto sealed = hpke::seal(suite, a.public_key, {}, {}, as_bytes("hello"));
  CHECK(hpke::open(suite, a.secret_key.view(), a.public_key, sealed.enc, {}, {}, sealed.ciphertext) ==
        to_bytes("hello"));
  try {
    hpke::open(suite, b.secret_key.view(), b.public_key, sealed.enc, {}, {}, sealed.ciphertext);
    FAIL("expected decrypt failure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DecryptFailure);
  }
}

TEST_CASE("seal rejects an off-curve P-256 point") {
  CipherSuite suite{kem::kP256, kdf::kHkdfSha256, aead::kAes128Gcm};
  Bytes bogus(65, 0x01);
  bogus[0] = 0x04;
  CHECK_THROWS_AS(hpke::seal(suite, bogus, {}, {}, as_bytes("x")), Error);
}

TEST_CASE("AEAD with empty plaintext yields the bare tag") {
  Bytes key(16, 7), nonce(12, 0);
  auto ct = hpke::aead_seal(aead::kAes128Gcm, key, nonce, {}, {});
  CHECK(ct.size() == 16);
  CHECK(hpke::aead_open(aead::kAes128Gcm, key, nonce, {}, ct).empty());
}

}  // TEST_SUITE
