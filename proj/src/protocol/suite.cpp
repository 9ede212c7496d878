#include "odoh/suite.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>

#include "odoh/error.hpp"

namespace odoh {

bool is_registered_kem(std::uint16_t id) {
  return id == kem::kP256 || id == kem::kP521 || id == kem::kX25519 || id == kem::kX448;
}

bool is_registered_kdf(std::uint16_t id) {
  return id >= kdf::kHkdfSha256 && id <= kdf::kHkdfSha512;
}

bool is_registered_aead(std::uint16_t id) {
  return id >= aead::kAes128Gcm && id <= aead::kChaCha20Poly1305;
}

bool CipherSuite::is_registered() const {
  return is_registered_kem(kem_id) && is_registered_kdf(kdf_id) && is_registered_aead(aead_id);
}

void CipherSuite::require_registered() const {
  if (!is_registered()) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "(0x%04x, 0x%04x, 0x%04x)", kem_id, kdf_id, aead_id);
    throw Error(ErrorCode::UnsupportedSuite, buf);
  }
}

std::size_t CipherSuite::key_size() const {
  require_registered();
  return aead_id == aead::kAes128Gcm ? 16 : 32;
}

std::size_t CipherSuite::nonce_size() const {
  require_registered();
  return 12;
}

std::size_t CipherSuite::tag_size() const {
  require_registered();
  return 16;
}

std::size_t CipherSuite::enc_size() const { return public_key_size(); }

std::size_t CipherSuite::public_key_size() const {
  require_registered();
  switch (kem_id) {
    case kem::kP256: return 65;
    case kem::kP521: return 133;
    case kem::kX25519: return 32;
    default: return 56;
  }
}

std::size_t CipherSuite::secret_key_size() const {
  require_registered();
  switch (kem_id) {
    case kem::kP256: return 32;
    case kem::kP521: return 66;
    case kem::kX25519: return 32;
    default: return 56;
  }
}

std::size_t CipherSuite::kdf_hash_size() const {
  require_registered();
  switch (kdf_id) {
    case kdf::kHkdfSha256: return 32;
    case kdf::kHkdfSha384: return 48;
    default: return 64;
  }
}

namespace {

std::string_view kem_name(std::uint16_t id) {
  switch (id) {
    case kem::kP256: return "P256";
    case kem::kP521: return "P521";
    case kem::kX25519: return "X25519";
    case kem::kX448: return "X448";
  }
  return "?";
}

std::string_view kdf_name(std::uint16_t id) {
  switch (id) {
    case kdf::kHkdfSha256: return "SHA256";
    case kdf::kHkdfSha384: return "SHA384";
    case kdf::kHkdfSha512: return "SHA512";
  }
  return "?";
}

std::string_view aead_name(std::uint16_t id) {
  switch (id) {
    case aead::kAes128Gcm: return "AES128GCM";
    case aead::kAes256Gcm: return "AES256GCM";
    case aead::kChaCha20Poly1305: return "CHACHA20POLY1305";
  }
  return "?";
}

constexpr std::uint16_t kKems[] = {kem::kX25519, kem::kP256, kem::kP521, kem::kX448};
constexpr std::uint16_t kKdfs[] = {kdf::kHkdfSha256, kdf::kHkdfSha384, kdf::kHkdfSha512};
constexpr std::uint16_t kAeads[] = {aead::kAes128Gcm, aead::kAes256Gcm, aead::kChaCha20Poly1305};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::string CipherSuite::name() const {
  std::string out;
  out += kem_name(kem_id);
  out += '/';
  out += kdf_name(kdf_id);
  out += '/';
  out += aead_name(aead_id);
  return out;
}

std::vector<CipherSuite> registered_suites() {
  std::vector<CipherSuite> out;
  for (auto k : kKems) {
    for (auto d : kKdfs) {
      for (auto a : kAeads) out.push_back({k, d, a});
    }
  }
  return out;
}

std::optional<CipherSuite> parse_suite_name(std::string_view name) {
  auto wanted = lower(name);
  std::replace(wanted.begin(), wanted.end(), '/', '-');
  for (const auto& s : registered_suites()) {
    auto candidate = lower(std::string(kem_name(s.kem_id)) + "-" + std::string(kdf_name(s.kdf_id)) +
                           "-" + std::string(aead_name(s.aead_id)));
    if (candidate == wanted) return s;
  }
  return std::nullopt;
}

}  // namespace odoh
