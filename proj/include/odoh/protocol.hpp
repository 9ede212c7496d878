#pragma once

// Oblivious DNS message protocol: target key configurations, the on-wire
// envelope, and query/response encapsulation.
//
// Wire layouts (all integers big-endian):
//
//   ConfigList     := u16 total_len, Config*
//   Config         := u16 version(0x0001), u16 contents_len, Contents
//   Contents       := u16 kem_id, u16 kdf_id, u16 aead_id, u16 pk_len, pk
//   Message        := u8 type, u16 key_id_len, key_id, u16 ct_len, ct
//   QueryPlaintext := u16 len, response_key, u16 len, dns, u16 len, zero padding
//
// A query's ct is enc || HPKE ciphertext sealed with info "odoh query" and
// AAD = key_id. A response's ct is AEAD(response_key, zero nonce, no AAD).

#include <cstdint>
#include <span>
#include <vector>

#include "odoh/bytes.hpp"
#include "odoh/crypto/secret_bytes.hpp"
#include "odoh/suite.hpp"

namespace odoh {

inline constexpr std::uint16_t kConfigVersion = 0x0001;
inline constexpr std::size_t kKeyIdSize = 32;
inline constexpr std::string_view kQueryInfo = "odoh query";
inline constexpr std::string_view kObliviousContentType = "application/oblivious-dns-message";
inline constexpr std::string_view kDnsContentType = "application/dns-message";
inline constexpr std::string_view kConfigsPath = "/.well-known/odoh/configs";

struct TargetKeyConfig {
  CipherSuite suite;
  Bytes public_key;

  /// kem ‖ kdf ‖ aead ‖ len-prefixed public key.
  [[nodiscard]] Bytes serialize_contents() const;

  friend bool operator==(const TargetKeyConfig&, const TargetKeyConfig&) = default;
};

struct TargetKeyPair {
  TargetKeyConfig config;
  SecretBytes secret_key;
};

/// Throws Error{UnsupportedSuite} for unregistered identifiers.
TargetKeyPair generate_key_pair(const CipherSuite& suite);

/// SHA-256 of the config's serialized contents.
Bytes derive_key_id(const TargetKeyConfig& config);

/// Throws Error{InvalidArgument} on an empty list.
Bytes serialize_config_list(std::span<const TargetKeyConfig> configs);

/// Structural parse. Configs with unregistered suites are returned as-is so
/// callers can skip them; known suites must carry a correctly sized key.
std::vector<TargetKeyConfig> parse_config_list(ByteView bytes);

enum class MessageType : std::uint8_t { Query = 0x01, Response = 0x02 };

struct ObliviousMessage {
  MessageType type = MessageType::Query;
  Bytes key_id;
  Bytes encrypted_message;

  [[nodiscard]] std::size_t serialized_size() const {
    return 1 + 2 + key_id.size() + 2 + encrypted_message.size();
  }

  friend bool operator==(const ObliviousMessage&, const ObliviousMessage&) = default;
};

Bytes serialize_message(const ObliviousMessage& message);
ObliviousMessage parse_message(ByteView bytes);

/// Client-side secret for one query. Move-only; opens at most one response.
class QueryContext {
 public:
  QueryContext(SecretBytes response_key, CipherSuite suite)
      : response_key_(std::move(response_key)), suite_(suite) {}
  QueryContext(QueryContext&&) noexcept = default;
  QueryContext& operator=(QueryContext&&) noexcept = default;
  QueryContext(const QueryContext&) = delete;
  QueryContext& operator=(const QueryContext&) = delete;

  [[nodiscard]] ByteView response_key() const { return response_key_.view(); }
  [[nodiscard]] const CipherSuite& suite() const { return suite_; }
  [[nodiscard]] bool consumed() const { return consumed_; }

 private:
  friend Bytes open_response(QueryContext& ctx, const ObliviousMessage& message);

  SecretBytes response_key_;
  CipherSuite suite_;
  bool consumed_ = false;
};

struct SealedQuery {
  ObliviousMessage message;
  QueryContext context;
};

/// Encapsulates dns_query to the target. padding_length zero bytes are
/// appended inside the ciphertext.
SealedQuery seal_query(const TargetKeyConfig& config, ByteView dns_query,
                       std::size_t padding_length = 0);

struct OpenedQuery {
  Bytes dns_query;
  SecretBytes response_key;
};

OpenedQuery open_query(const TargetKeyPair& key_pair, const ObliviousMessage& message);

/// Tries each key pair whose key_id matches; Error{UnknownKeyId} if none does.
OpenedQuery open_query(std::span<const TargetKeyPair> key_pairs, const ObliviousMessage& message,
                       const TargetKeyPair** used = nullptr);

ObliviousMessage seal_response(ByteView response_key, const CipherSuite& suite,
                               ByteView dns_response);

Bytes open_response(QueryContext& ctx, const ObliviousMessage& message);

}  // namespace odoh
