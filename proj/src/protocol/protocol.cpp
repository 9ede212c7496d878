#include "odoh/protocol.hpp"

#include <openssl/crypto.h>

#include "odoh/crypto/hpke.hpp"
#include "odoh/error.hpp"

namespace odoh {

namespace {

constexpr std::size_t kDnsHeaderSize = 12;

}  // namespace

Bytes TargetKeyConfig::serialize_contents() const {
  ByteWriter w;
  w.u16(suite.kem_id).u16(suite.kdf_id).u16(suite.aead_id).prefixed16(public_key);
  return std::move(w).take();
}

TargetKeyPair generate_key_pair(const CipherSuite& suite) {
  suite.require_registered();
  auto kp = hpke::generate_key_pair(suite.kem_id);
  return {TargetKeyConfig{suite, std::move(kp.public_key)}, std::move(kp.secret_key)};
}

Bytes derive_key_id(const TargetKeyConfig& config) {
  return hpke::sha256(config.serialize_contents());
}

Bytes serialize_config_list(std::span<const TargetKeyConfig> configs) {
  if (configs.empty()) throw Error(ErrorCode::InvalidArgument, "config list is empty");
  ByteWriter body;
  for (const auto& c : configs) {
    body.u16(kConfigVersion).prefixed16(c.serialize_contents());
  }
  ByteWriter out;
  out.prefixed16(body.bytes());
  return std::move(out).take();
}

std::vector<TargetKeyConfig> parse_config_list(ByteView bytes) {
  ByteReader outer(bytes, ErrorCode::MalformedConfig);
  auto list = outer.prefixed16();
  if (!outer.empty()) throw Error(ErrorCode::MalformedConfig, "trailing bytes after config list");

  std::vector<TargetKeyConfig> configs;
  ByteReader r(list, ErrorCode::MalformedConfig);
  while (!r.empty()) {
    auto version = r.u16();
    if (version != kConfigVersion) throw Error(ErrorCode::MalformedConfig, "unsupported config version");
    ByteReader contents(r.prefixed16(), ErrorCode::MalformedConfig);
    TargetKeyConfig c;
    c.suite.kem_id = contents.u16();
    c.suite.kdf_id = contents.u16();
    c.suite.aead_id = contents.u16();
    auto pk = contents.prefixed16();
    if (!contents.empty()) throw Error(ErrorCode::MalformedConfig, "config contents length mismatch");
    if (c.suite.is_registered() && pk.size() != c.suite.public_key_size()) {
      throw Error(ErrorCode::MalformedConfig, "public key length does not match KEM");
    }
    c.public_key.assign(pk.begin(), pk.end());
    configs.push_back(std::move(c));
  }
  if (configs.empty()) throw Error(ErrorCode::MalformedConfig, "config list is empty");
  return configs;
}

Bytes serialize_message(const ObliviousMessage& message) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(message.type)).prefixed16(message.key_id).prefixed16(message.encrypted_message);
  return std::move(w).take();
}

ObliviousMessage parse_message(ByteView bytes) {
  if (bytes.size() < 5) throw Error(ErrorCode::MalformedMessage, "message shorter than 5 bytes");
  ByteReader r(bytes, ErrorCode::MalformedMessage);
  auto type = r.u8();
  if (type != static_cast<std::uint8_t>(MessageType::Query) &&
      type != static_cast<std::uint8_t>(MessageType::Response)) {
    throw Error(ErrorCode::MalformedMessage, "invalid message type");
  }
  ObliviousMessage m;
  m.type = static_cast<MessageType>(type);
  auto key_id = r.prefixed16();
  auto ct = r.prefixed16();
  if (!r.empty()) throw Error(ErrorCode::MalformedMessage, "trailing bytes after message");
  m.key_id.assign(key_id.begin(), key_id.end());
  m.encrypted_message.assign(ct.begin(), ct.end());
  return m;
}

SealedQuery seal_query(const TargetKeyConfig& config, ByteView dns_query, std::size_t padding_length) {
  config.suite.require_registered();
  if (dns_query.size() < kDnsHeaderSize) {
    throw Error(ErrorCode::MalformedDns, "query shorter than a DNS header");
  }
  SecretBytes response_key(hpke::random_bytes(config.suite.key_size()));

  ByteWriter pt;
  pt.prefixed16(response_key.view()).prefixed16(dns_query).prefixed16(Bytes(padding_length, 0));
  Bytes plaintext = std::move(pt).take();

  auto key_id = derive_key_id(config);
  auto sealed = hpke::seal(config.suite, config.public_key, as_bytes(kQueryInfo), key_id, plaintext);
  OPENSSL_cleanse(plaintext.data(), plaintext.size());

  ObliviousMessage m{MessageType::Query, std::move(key_id), std::move(sealed.enc)};
  m.encrypted_message.insert(m.encrypted_message.end(), sealed.ciphertext.begin(), sealed.ciphertext.end());
  return {std::move(m), QueryContext(std::move(response_key), config.suite)};
}

OpenedQuery open_query(const TargetKeyPair& key_pair, const ObliviousMessage& message) {
  const auto& suite = key_pair.config.suite;
  if (message.type != MessageType::Query) {
    throw Error(ErrorCode::MalformedMessage, "expected a query message");
  }
  if (!hpke::constant_time_equal(message.key_id, derive_key_id(key_pair.config))) {
    throw Error(ErrorCode::UnknownKeyId, "key_id does not match this target key");
  }
  const auto enc_size = suite.enc_size();
  if (message.encrypted_message.size() < enc_size + suite.tag_size()) {
    throw Error(ErrorCode::DecryptFailure, "encrypted message too short");
  }
  ByteView body(message.encrypted_message);
  auto plaintext = hpke::open(suite, key_pair.secret_key.view(), key_pair.config.public_key,
                              body.first(enc_size), as_bytes(kQueryInfo), message.key_id,
                              body.subspan(enc_size));
  SecretBytes guard(std::move(plaintext));

  ByteReader r(guard.view(), ErrorCode::MalformedPlaintext);
  auto response_key = r.prefixed16();
  auto dns = r.prefixed16();
  auto padding = r.prefixed16();
  if (!r.empty()) throw Error(ErrorCode::MalformedPlaintext, "trailing bytes after padding");
  if (response_key.size() != suite.key_size()) {
    throw Error(ErrorCode::MalformedPlaintext, "response key length does not match AEAD");
  }
  for (auto b : padding) {
    if (b != 0) throw Error(ErrorCode::MalformedPlaintext, "non-zero padding");
  }
  return {Bytes(dns.begin(), dns.end()), SecretBytes(response_key)};
}

OpenedQuery open_query(std::span<const TargetKeyPair> key_pairs, const ObliviousMessage& message,
                       const TargetKeyPair** used) {
  for (const auto& kp : key_pairs) {
    if (hpke::constant_time_equal(message.key_id, derive_key_id(kp.config))) {
      if (used != nullptr) *used = &kp;
      return open_query(kp, message);
    }
  }
  throw Error(ErrorCode::UnknownKeyId, "no active key matches key_id");
}

ObliviousMessage seal_response(ByteView response_key, const CipherSuite& suite, ByteView dns_response) {
  if (response_key.size() != suite.key_size()) {
    throw Error(ErrorCode::BadKeyLength, "response key length does not match AEAD");
  }
  const Bytes nonce(suite.nonce_size(), 0);
  return {MessageType::Response, {}, hpke::aead_seal(suite.aead_id, response_key, nonce, {}, dns_response)};
}

Bytes open_response(QueryContext& ctx, const ObliviousMessage& message) {
  if (ctx.consumed_) throw Error(ErrorCode::ContextConsumed, "query context already used");
  if (message.type != MessageType::Response || !message.key_id.empty()) {
    throw Error(ErrorCode::MalformedMessage, "expected a response message");
  }
  const Bytes nonce(ctx.suite_.nonce_size(), 0);
  auto out = hpke::aead_open(ctx.suite_.aead_id, ctx.response_key_.view(), nonce, {},
                             message.encrypted_message);
  ctx.consumed_ = true;
  return out;
}

}  // namespace odoh
