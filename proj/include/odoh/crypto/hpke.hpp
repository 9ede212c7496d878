#pragma once

// HPKE base mode (RFC 9180) single-shot seal/open, composed from OpenSSL EVP
// primitives: DHKEM over P-256, P-521, X25519, X448; HKDF-SHA2; AES-GCM and
// ChaCha20-Poly1305.

#include "odoh/bytes.hpp"
#include "odoh/crypto/secret_bytes.hpp"
#include "odoh/suite.hpp"

namespace odoh::hpke {

struct KeyPair {
  SecretBytes secret_key;
  Bytes public_key;
};

KeyPair generate_key_pair(std::uint16_t kem_id);

/// Throws Error{CryptoFailure} unless secret_key and public_key form a valid
/// pair under the KEM.
void check_key_pair(std::uint16_t kem_id, ByteView secret_key, ByteView public_key);

struct Sealed {
  Bytes enc;
  Bytes ciphertext;
};

Sealed seal(const CipherSuite& suite, ByteView recipient_public_key, ByteView info,
            ByteView aad, ByteView plaintext);

/// Throws Error{DecryptFailure} on any authentication or decapsulation failure.
Bytes open(const CipherSuite& suite, ByteView recipient_secret_key,
           ByteView recipient_public_key, ByteView enc, ByteView info, ByteView aad,
           ByteView ciphertext);

Bytes aead_seal(std::uint16_t aead_id, ByteView key, ByteView nonce, ByteView aad,
                ByteView plaintext);
Bytes aead_open(std::uint16_t aead_id, ByteView key, ByteView nonce, ByteView aad,
                ByteView ciphertext);

Bytes random_bytes(std::size_t n);
Bytes sha256(ByteView data);
bool constant_time_equal(ByteView a, ByteView b);

namespace detail {

/// Seal with a caller-supplied ephemeral key pair. Test vectors only.
Sealed seal_with_ephemeral(const CipherSuite& suite, ByteView recipient_public_key,
                           ByteView ephemeral_secret_key, ByteView ephemeral_public_key,
                           ByteView info, ByteView aad, ByteView plaintext);

}  // namespace detail

}  // namespace odoh::hpke
