#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace odoh {

// HPKE algorithm registry codepoints.
namespace kem {
inline constexpr std::uint16_t kP256 = 0x0010;
inline constexpr std::uint16_t kP521 = 0x0012;
inline constexpr std::uint16_t kX25519 = 0x0020;
inline constexpr std::uint16_t kX448 = 0x0021;
}  // namespace kem

namespace kdf {
inline constexpr std::uint16_t kHkdfSha256 = 0x0001;
inline constexpr std::uint16_t kHkdfSha384 = 0x0002;
inline constexpr std::uint16_t kHkdfSha512 = 0x0003;
}  // namespace kdf

namespace aead {
inline constexpr std::uint16_t kAes128Gcm = 0x0001;
inline constexpr std::uint16_t kAes256Gcm = 0x0002;
inline constexpr std::uint16_t kChaCha20Poly1305 = 0x0003;
}  // namespace aead

bool is_registered_kem(std::uint16_t id);
bool is_registered_kdf(std::uint16_t id);
bool is_registered_aead(std::uint16_t id);

/// KEM/KDF/AEAD triple. All size accessors throw Error{UnsupportedSuite} when
/// any identifier is outside the registry.
struct CipherSuite {
  std::uint16_t kem_id = kem::kX25519;
  std::uint16_t kdf_id = kdf::kHkdfSha256;
  std::uint16_t aead_id = aead::kAes128Gcm;

  static constexpr CipherSuite default_suite() {
    return {kem::kX25519, kdf::kHkdfSha256, aead::kAes128Gcm};
  }

  [[nodiscard]] bool is_registered() const;
  void require_registered() const;

  /// AEAD key length (Nk).
  [[nodiscard]] std::size_t key_size() const;
  /// AEAD nonce length (Nn).
  [[nodiscard]] std::size_t nonce_size() const;
  /// AEAD tag length (Nt).
  [[nodiscard]] std::size_t tag_size() const;
  /// KEM encapsulated key length (Nenc).
  [[nodiscard]] std::size_t enc_size() const;
  /// KEM serialized public key length (Npk).
  [[nodiscard]] std::size_t public_key_size() const;
  /// KEM serialized private key length (Nsk).
  [[nodiscard]] std::size_t secret_key_size() const;
  /// KDF output length (Nh).
  [[nodiscard]] std::size_t kdf_hash_size() const;

  /// e.g. "X25519/HKDF-SHA256/AES-128-GCM"
  [[nodiscard]] std::string name() const;

  friend bool operator==(const CipherSuite&, const CipherSuite&) = default;
};

/// Every registered (kem, kdf, aead) combination, default suite first.
std::vector<CipherSuite> registered_suites();

/// Accepts "x25519-sha256-aes128gcm" style names, case-insensitive; components
/// are kem in {p256,p521,x25519,x448}, kdf in {sha256,sha384,sha512}, aead in
/// {aes128gcm,aes256gcm,chacha20poly1305}.
std::optional<CipherSuite> parse_suite_name(std::string_view name);

}  // namespace odoh
