#include "odoh/crypto/hpke.hpp"

#include <openssl/bn.h>
#include <openssl/core_names.h>
#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/param_build.h>
#include <openssl/rand.h>
#include <openssl/sha.h>

#include <memory>
#include <optional>

#include "odoh/error.hpp"

namespace odoh::hpke {
namespace {

struct PkeyDeleter {
  void operator()(EVP_PKEY* p) const { EVP_PKEY_free(p); }
};
struct PkeyCtxDeleter {
  void operator()(EVP_PKEY_CTX* p) const { EVP_PKEY_CTX_free(p); }
};
struct CipherCtxDeleter {
  void operator()(EVP_CIPHER_CTX* p) const { EVP_CIPHER_CTX_free(p); }
};
struct BnDeleter {
  void operator()(BIGNUM* p) const { BN_clear_free(p); }
};
struct ParamBldDeleter {
  void operator()(OSSL_PARAM_BLD* p) const { OSSL_PARAM_BLD_free(p); }
};
struct ParamDeleter {
  void operator()(OSSL_PARAM* p) const { OSSL_PARAM_free(p); }
};

using Pkey = std::unique_ptr<EVP_PKEY, PkeyDeleter>;
using PkeyCtx = std::unique_ptr<EVP_PKEY_CTX, PkeyCtxDeleter>;

[[noreturn]] void crypto_fail(const char* what) { throw Error(ErrorCode::CryptoFailure, what); }

// DHKEM parameters. The KEM's own KDF is fixed per KEM, independent of the
// suite's key-schedule KDF.
struct KemInfo {
  std::uint16_t id;
  const char* group;  // EC group name, or nullptr for the X curves
  int raw_type;       // EVP_PKEY_X25519 / EVP_PKEY_X448 for the X curves
  std::size_t pk_size;
  std::size_t sk_size;
  std::uint16_t kdf_id;
};

const KemInfo& kem_info(std::uint16_t id) {
  static const KemInfo kP256{kem::kP256, "P-256", 0, 65, 32, kdf::kHkdfSha256};
  static const KemInfo kP521{kem::kP521, "P-521", 0, 133, 66, kdf::kHkdfSha512};
  static const KemInfo kX25519{kem::kX25519, nullptr, EVP_PKEY_X25519, 32, 32, kdf::kHkdfSha256};
  static const KemInfo kX448{kem::kX448, nullptr, EVP_PKEY_X448, 56, 56, kdf::kHkdfSha512};
  switch (id) {
    case kem::kP256: return kP256;
    case kem::kP521: return kP521;
    case kem::kX25519: return kX25519;
    case kem::kX448: return kX448;
  }
  throw Error(ErrorCode::UnsupportedSuite, "unregistered KEM");
}

const EVP_MD* kdf_digest(std::uint16_t kdf_id) {
  switch (kdf_id) {
    case kdf::kHkdfSha256: return EVP_sha256();
    case kdf::kHkdfSha384: return EVP_sha384();
    case kdf::kHkdfSha512: return EVP_sha512();
  }
  throw Error(ErrorCode::UnsupportedSuite, "unregistered KDF");
}

const EVP_CIPHER* aead_cipher(std::uint16_t aead_id) {
  switch (aead_id) {
    case aead::kAes128Gcm: return EVP_aes_128_gcm();
    case aead::kAes256Gcm: return EVP_aes_256_gcm();
    case aead::kChaCha20Poly1305: return EVP_chacha20_poly1305();
  }
  throw Error(ErrorCode::UnsupportedSuite, "unregistered AEAD");
}

// ---- key handling -------------------------------------------------------

Pkey ec_key_from_params(const KemInfo& info, ByteView public_key, ByteView secret_key) {
  std::unique_ptr<OSSL_PARAM_BLD, ParamBldDeleter> bld(OSSL_PARAM_BLD_new());
  if (!bld) crypto_fail("OSSL_PARAM_BLD_new");
  std::unique_ptr<BIGNUM, BnDeleter> priv;
  if (!OSSL_PARAM_BLD_push_utf8_string(bld.get(), OSSL_PKEY_PARAM_GROUP_NAME, info.group, 0) ||
      !OSSL_PARAM_BLD_push_octet_string(bld.get(), OSSL_PKEY_PARAM_PUB_KEY, public_key.data(),
                                        public_key.size())) {
    crypto_fail("param push");
  }
  if (!secret_key.empty()) {
    priv.reset(BN_bin2bn(secret_key.data(), static_cast<int>(secret_key.size()), nullptr));
    if (!priv || !OSSL_PARAM_BLD_push_BN(bld.get(), OSSL_PKEY_PARAM_PRIV_KEY, priv.get())) {
      crypto_fail("param push");
    }
  }
  std::unique_ptr<OSSL_PARAM, ParamDeleter> params(OSSL_PARAM_BLD_to_param(bld.get()));
  PkeyCtx ctx(EVP_PKEY_CTX_new_from_name(nullptr, "EC", nullptr));
  EVP_PKEY* raw = nullptr;
  int selection = secret_key.empty() ? EVP_PKEY_PUBLIC_KEY : EVP_PKEY_KEYPAIR;
  if (!params || !ctx || EVP_PKEY_fromdata_init(ctx.get()) <= 0 ||
      EVP_PKEY_fromdata(ctx.get(), &raw, selection, params.get()) <= 0) {
    return nullptr;
  }
  Pkey key(raw);
  // fromdata does not validate the point; reject off-curve peers.
  PkeyCtx check(EVP_PKEY_CTX_new_from_pkey(nullptr, key.get(), nullptr));
  if (!check || EVP_PKEY_public_check(check.get()) <= 0) return nullptr;
  return key;
}

Pkey public_key_from_bytes(const KemInfo& info, ByteView public_key) {
  if (public_key.size() != info.pk_size) return nullptr;
  if (info.group == nullptr) {
    return Pkey(EVP_PKEY_new_raw_public_key(info.raw_type, nullptr, public_key.data(),
                                            public_key.size()));
  }
  return ec_key_from_params(info, public_key, {});
}

Pkey private_key_from_bytes(const KemInfo& info, ByteView secret_key, ByteView public_key) {
  if (secret_key.size() != info.sk_size) return nullptr;
  if (info.group == nullptr) {
    return Pkey(EVP_PKEY_new_raw_private_key(info.raw_type, nullptr, secret_key.data(),
                                             secret_key.size()));
  }
  if (public_key.size() != info.pk_size) return nullptr;
  return ec_key_from_params(info, public_key, secret_key);
}

Pkey generate(const KemInfo& info) {
  EVP_PKEY* raw = nullptr;
  if (info.group == nullptr) {
    raw = EVP_PKEY_Q_keygen(nullptr, nullptr, info.raw_type == EVP_PKEY_X25519 ? "X25519" : "X448");
  } else {
    raw = EVP_PKEY_Q_keygen(nullptr, nullptr, "EC", info.group);
  }
  if (raw == nullptr) crypto_fail("key generation");
  return Pkey(raw);
}

Bytes serialize_public(const KemInfo& info, EVP_PKEY* key) {
  Bytes out(info.pk_size);
  std::size_t len = out.size();
  if (info.group == nullptr) {
    if (EVP_PKEY_get_raw_public_key(key, out.data(), &len) <= 0) crypto_fail("get public key");
  } else if (EVP_PKEY_get_octet_string_param(key, OSSL_PKEY_PARAM_ENCODED_PUBLIC_KEY, out.data(),
                                             out.size(), &len) <= 0) {
    crypto_fail("get public key");
  }
  if (len != info.pk_size) crypto_fail("unexpected public key length");
  return out;
}

SecretBytes serialize_private(const KemInfo& info, EVP_PKEY* key) {
  Bytes out(info.sk_size);
  if (info.group == nullptr) {
    std::size_t len = out.size();
    if (EVP_PKEY_get_raw_private_key(key, out.data(), &len) <= 0 || len != info.sk_size) {
      crypto_fail("get private key");
    }
  } else {
    BIGNUM* raw = nullptr;
    if (EVP_PKEY_get_bn_param(key, OSSL_PKEY_PARAM_PRIV_KEY, &raw) <= 0) crypto_fail("get private key");
    std::unique_ptr<BIGNUM, BnDeleter> bn(raw);
    if (BN_bn2binpad(bn.get(), out.data(), static_cast<int>(out.size())) < 0) {
      crypto_fail("private key encoding");
    }
  }
  SecretBytes secret(std::move(out));
  return secret;
}

/// Raw DH output; nullopt when the exchange fails (invalid peer, zero output).
std::optional<SecretBytes> dh(EVP_PKEY* own, EVP_PKEY* peer) {
  PkeyCtx ctx(EVP_PKEY_CTX_new_from_pkey(nullptr, own, nullptr));
  std::size_t len = 0;
  if (!ctx || EVP_PKEY_derive_init(ctx.get()) <= 0 || EVP_PKEY_derive_set_peer(ctx.get(), peer) <= 0 ||
      EVP_PKEY_derive(ctx.get(), nullptr, &len) <= 0) {
    return std::nullopt;
  }
  Bytes out(len);
  if (EVP_PKEY_derive(ctx.get(), out.data(), &len) <= 0) return std::nullopt;
  out.resize(len);
  return SecretBytes(std::move(out));
}

// ---- labeled HKDF ---------------------------------------------------------

constexpr std::string_view kVersionLabel = "HPKE-v1";

Bytes hmac(const EVP_MD* md, ByteView key, ByteView data) {
  static const std::uint8_t kEmpty = 0;
  Bytes out(EVP_MAX_MD_SIZE);
  unsigned int len = 0;
  const void* key_ptr = key.empty() ? &kEmpty : key.data();
  if (HMAC(md, key_ptr, static_cast<int>(key.size()), data.data(), data.size(), out.data(), &len) ==
      nullptr) {
    crypto_fail("HMAC");
  }
  out.resize(len);
  return out;
}

class LabeledKdf {
 public:
  LabeledKdf(std::uint16_t kdf_id, Bytes suite_id)
      : md_(kdf_digest(kdf_id)), suite_id_(std::move(suite_id)) {}

  [[nodiscard]] std::size_t hash_size() const { return static_cast<std::size_t>(EVP_MD_get_size(md_)); }

  Bytes extract(ByteView salt, std::string_view label, ByteView ikm) const {
    ByteWriter w;
    w.raw(as_bytes(kVersionLabel)).raw(suite_id_).raw(as_bytes(label)).raw(ikm);
    return hmac(md_, salt, w.bytes());
  }

  Bytes expand(ByteView prk, std::string_view label, ByteView info, std::size_t length) const {
    ByteWriter w;
    w.u16(static_cast<std::uint16_t>(length)).raw(as_bytes(kVersionLabel)).raw(suite_id_);
    w.raw(as_bytes(label)).raw(info);
    const Bytes labeled_info = std::move(w).take();

    // RFC 5869 expand.
    Bytes out;
    Bytes block;
    for (std::uint8_t counter = 1; out.size() < length; ++counter) {
      Bytes input = block;
      input.insert(input.end(), labeled_info.begin(), labeled_info.end());
      input.push_back(counter);
      block = hmac(md_, prk, input);
      out.insert(out.end(), block.begin(), block.end());
    }
    out.resize(length);
    return out;
  }

 private:
  const EVP_MD* md_;
  Bytes suite_id_;
};

Bytes kem_suite_id(std::uint16_t kem_id) {
  ByteWriter w;
  w.raw(as_bytes("KEM")).u16(kem_id);
  return std::move(w).take();
}

Bytes hpke_suite_id(const CipherSuite& suite) {
  ByteWriter w;
  w.raw(as_bytes("HPKE")).u16(suite.kem_id).u16(suite.kdf_id).u16(suite.aead_id);
  return std::move(w).take();
}

SecretBytes extract_and_expand(const KemInfo& info, ByteView dh_out, ByteView kem_context) {
  LabeledKdf kdf(info.kdf_id, kem_suite_id(info.id));
  auto prk = kdf.extract({}, "eae_prk", dh_out);
  auto secret = kdf.expand(prk, "shared_secret", kem_context, kdf.hash_size());
  OPENSSL_cleanse(prk.data(), prk.size());
  return SecretBytes(std::move(secret));
}

struct KeySchedule {
  SecretBytes key;
  Bytes base_nonce;
};

KeySchedule key_schedule_base(const CipherSuite& suite, ByteView shared_secret, ByteView info) {
  LabeledKdf kdf(suite.kdf_id, hpke_suite_id(suite));
  auto psk_id_hash = kdf.extract({}, "psk_id_hash", {});
  auto info_hash = kdf.extract({}, "info_hash", info);
  ByteWriter ctx;
  ctx.u8(0x00).raw(psk_id_hash).raw(info_hash);  // mode_base
  auto secret = kdf.extract(shared_secret, "secret", {});
  KeySchedule ks{SecretBytes(kdf.expand(secret, "key", ctx.bytes(), suite.key_size())),
                 kdf.expand(secret, "base_nonce", ctx.bytes(), suite.nonce_size())};
  OPENSSL_cleanse(secret.data(), secret.size());
  return ks;
}

Sealed seal_with(const CipherSuite& suite, const KemInfo& info, EVP_PKEY* recipient,
                 ByteView recipient_public_key, EVP_PKEY* ephemeral, ByteView aad, ByteView hpke_info,
                 ByteView plaintext) {
  auto dh_out = dh(ephemeral, recipient);
  if (!dh_out) crypto_fail("DH with recipient key failed");
  Bytes enc = serialize_public(info, ephemeral);
  auto shared = extract_and_expand(info, dh_out->view(), concat(enc, recipient_public_key));
  auto ks = key_schedule_base(suite, shared.view(), hpke_info);
  return {std::move(enc), aead_seal(suite.aead_id, ks.key.view(), ks.base_nonce, aad, plaintext)};
}

}  // namespace

KeyPair generate_key_pair(std::uint16_t kem_id) {
  const auto& info = kem_info(kem_id);
  auto key = generate(info);
  return {serialize_private(info, key.get()), serialize_public(info, key.get())};
}

void check_key_pair(std::uint16_t kem_id, ByteView secret_key, ByteView public_key) {
  const auto& info = kem_info(kem_id);
  auto key = private_key_from_bytes(info, secret_key, public_key);
  if (!key) throw Error(ErrorCode::CryptoFailure, "secret key does not parse");
  if (info.group != nullptr) {
    PkeyCtx ctx(EVP_PKEY_CTX_new_from_pkey(nullptr, key.get(), nullptr));
    if (!ctx || EVP_PKEY_pairwise_check(ctx.get()) <= 0) {
      throw Error(ErrorCode::CryptoFailure, "public key does not match secret key");
    }
  }
  if (serialize_public(info, key.get()) != Bytes(public_key.begin(), public_key.end())) {
    throw Error(ErrorCode::CryptoFailure, "public key does not match secret key");
  }
}

Sealed seal(const CipherSuite& suite, ByteView recipient_public_key, ByteView info, ByteView aad,
            ByteView plaintext) {
  suite.require_registered();
  const auto& kinfo = kem_info(suite.kem_id);
  auto recipient = public_key_from_bytes(kinfo, recipient_public_key);
  if (!recipient) crypto_fail("invalid recipient public key");
  auto ephemeral = generate(kinfo);
  return seal_with(suite, kinfo, recipient.get(), recipient_public_key, ephemeral.get(), aad, info,
                   plaintext);
}

Bytes open(const CipherSuite& suite, ByteView recipient_secret_key, ByteView recipient_public_key,
           ByteView enc, ByteView info, ByteView aad, ByteView ciphertext) {
  suite.require_registered();
  const auto& kinfo = kem_info(suite.kem_id);
  auto own = private_key_from_bytes(kinfo, recipient_secret_key, recipient_public_key);
  if (!own) crypto_fail("invalid recipient key pair");
  auto ephemeral = public_key_from_bytes(kinfo, enc);
  if (!ephemeral) throw Error(ErrorCode::DecryptFailure, "invalid encapsulated key");
  auto dh_out = dh(own.get(), ephemeral.get());
  if (!dh_out) throw Error(ErrorCode::DecryptFailure, "decapsulation failed");
  auto shared = extract_and_expand(kinfo, dh_out->view(), concat(enc, recipient_public_key));
  auto ks = key_schedule_base(suite, shared.view(), info);
  return aead_open(suite.aead_id, ks.key.view(), ks.base_nonce, aad, ciphertext);
}

Bytes aead_seal(std::uint16_t aead_id, ByteView key, ByteView nonce, ByteView aad, ByteView plaintext) {
  const EVP_CIPHER* cipher = aead_cipher(aead_id);
  if (key.size() != static_cast<std::size_t>(EVP_CIPHER_get_key_length(cipher))) {
    throw Error(ErrorCode::BadKeyLength, "AEAD key length mismatch");
  }
  if (nonce.size() != 12) throw Error(ErrorCode::InvalidArgument, "AEAD nonce must be 12 bytes");
  std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter> ctx(EVP_CIPHER_CTX_new());
  Bytes out(plaintext.size() + 16);
  int len = 0;
  if (!ctx || EVP_EncryptInit_ex(ctx.get(), cipher, nullptr, key.data(), nonce.data()) != 1) {
    crypto_fail("AEAD init");
  }
  if (!aad.empty() &&
      EVP_EncryptUpdate(ctx.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())) != 1) {
    crypto_fail("AEAD aad");
  }
  int written = 0;
  if (!plaintext.empty()) {
    if (EVP_EncryptUpdate(ctx.get(), out.data(), &len, plaintext.data(),
                          static_cast<int>(plaintext.size())) != 1) {
      crypto_fail("AEAD encrypt");
    }
    written = len;
  }
  if (EVP_EncryptFinal_ex(ctx.get(), out.data() + written, &len) != 1) crypto_fail("AEAD final");
  written += len;
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_AEAD_GET_TAG, 16, out.data() + written) != 1) {
    crypto_fail("AEAD tag");
  }
  out.resize(static_cast<std::size_t>(written) + 16);
  return out;
}

Bytes aead_open(std::uint16_t aead_id, ByteView key, ByteView nonce, ByteView aad,
                ByteView ciphertext) {
  const EVP_CIPHER* cipher = aead_cipher(aead_id);
  if (key.size() != static_cast<std::size_t>(EVP_CIPHER_get_key_length(cipher))) {
    throw Error(ErrorCode::BadKeyLength, "AEAD key length mismatch");
  }
  if (nonce.size() != 12) throw Error(ErrorCode::InvalidArgument, "AEAD nonce must be 12 bytes");
  if (ciphertext.size() < 16) throw Error(ErrorCode::DecryptFailure, "ciphertext shorter than tag");
  const auto body = ciphertext.first(ciphertext.size() - 16);
  Bytes tag(ciphertext.end() - 16, ciphertext.end());
  std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter> ctx(EVP_CIPHER_CTX_new());
  Bytes out(body.size() + 16);
  int len = 0;
  if (!ctx || EVP_DecryptInit_ex(ctx.get(), cipher, nullptr, key.data(), nonce.data()) != 1) {
    crypto_fail("AEAD init");
  }
  if (!aad.empty() &&
      EVP_DecryptUpdate(ctx.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())) != 1) {
    crypto_fail("AEAD aad");
  }
  int written = 0;
  if (!body.empty()) {
    if (EVP_DecryptUpdate(ctx.get(), out.data(), &len, body.data(), static_cast<int>(body.size())) != 1) {
      throw Error(ErrorCode::DecryptFailure, "AEAD decrypt");
    }
    written = len;
  }
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_AEAD_SET_TAG, 16, tag.data()) != 1) {
    crypto_fail("AEAD set tag");
  }
  if (EVP_DecryptFinal_ex(ctx.get(), out.data() + written, &len) != 1) {
    OPENSSL_cleanse(out.data(), out.size());
    throw Error(ErrorCode::DecryptFailure, "AEAD authentication failed");
  }
  out.resize(static_cast<std::size_t>(written + len));
  return out;
}

Bytes random_bytes(std::size_t n) {
  Bytes out(n);
  if (n > 0 && RAND_bytes(out.data(), static_cast<int>(n)) != 1) crypto_fail("RAND_bytes");
  return out;
}

Bytes sha256(ByteView data) {
  Bytes out(SHA256_DIGEST_LENGTH);
  if (EVP_Digest(data.data(), data.size(), out.data(), nullptr, EVP_sha256(), nullptr) != 1) {
    crypto_fail("SHA-256");
  }
  return out;
}

bool constant_time_equal(ByteView a, ByteView b) {
  return a.size() == b.size() && CRYPTO_memcmp(a.data(), b.data(), a.size()) == 0;
}

namespace detail {

Sealed seal_with_ephemeral(const CipherSuite& suite, ByteView recipient_public_key,
                           ByteView ephemeral_secret_key, ByteView ephemeral_public_key, ByteView info,
                           ByteView aad, ByteView plaintext) {
  suite.require_registered();
  const auto& kinfo = kem_info(suite.kem_id);
  auto recipient = public_key_from_bytes(kinfo, recipient_public_key);
  auto ephemeral = private_key_from_bytes(kinfo, ephemeral_secret_key, ephemeral_public_key);
  if (!recipient || !ephemeral) crypto_fail("invalid key material");
  return seal_with(suite, kinfo, recipient.get(), recipient_public_key, ephemeral.get(), aad, info,
                   plaintext);
}

}  // namespace detail

}  // namespace odoh::hpke
