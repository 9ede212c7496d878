#pragma once

// Minimal DNS wire format: query construction with optional 0x20 case
// randomization, response parsing with compression pointers, and the
// response builder used by the mock resolver.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "odoh/bytes.hpp"

namespace odoh::dns {

inline constexpr std::size_t kHeaderSize = 12;
inline constexpr std::size_t kMaxMessageSize = 4096;
inline constexpr std::size_t kMaxNameLength = 253;
inline constexpr std::size_t kMaxLabelLength = 63;
inline constexpr std::uint32_t kDefaultEmptyTtl = 30;

namespace type {
inline constexpr std::uint16_t kA = 1;
inline constexpr std::uint16_t kNs = 2;
inline constexpr std::uint16_t kCname = 5;
inline constexpr std::uint16_t kTxt = 16;
inline constexpr std::uint16_t kAaaa = 28;
inline constexpr std::uint16_t kHttps = 65;
}  // namespace type

inline constexpr std::uint16_t kClassIn = 1;

namespace rcode {
inline constexpr std::uint8_t kNoError = 0;
inline constexpr std::uint8_t kFormErr = 1;
inline constexpr std::uint8_t kServFail = 2;
inline constexpr std::uint8_t kNxDomain = 3;
}  // namespace rcode

/// "A", "AAAA", "HTTPS", ... or a decimal number; nullopt otherwise.
std::optional<std::uint16_t> parse_type(std::string_view name);
std::string type_name(std::uint16_t type);
std::string rcode_name(std::uint8_t rcode);

struct Question {
  /// Lowercase, no trailing dot.
  std::string qname;
  std::uint16_t qtype = type::kA;
  std::uint16_t qclass = kClassIn;
  /// Casing as it appeared on the wire; empty means same as qname.
  std::string display_name;

  [[nodiscard]] const std::string& wire_name() const {
    return display_name.empty() ? qname : display_name;
  }
};

/// Validates and normalizes a hostname. Throws Error{NameTooLong} or
/// Error{LabelTooLong}; Error{InvalidArgument} for empty labels.
Question make_question(std::string_view name, std::uint16_t qtype, std::uint16_t qclass = kClassIn);

/// Encoded length of a validated name, including the root label.
std::size_t encoded_name_length(std::string_view name);

Bytes build_query(const Question& q, std::uint16_t id, bool use_0x20);

struct ResourceRecord {
  std::string name;
  std::uint16_t type = type::kA;
  std::uint16_t klass = kClassIn;
  std::uint32_t ttl = 0;
  Bytes rdata;
};

struct Header {
  std::uint16_t id = 0;
  std::uint16_t flags = 0;
  std::uint16_t qdcount = 0;
  std::uint16_t ancount = 0;
  std::uint16_t nscount = 0;
  std::uint16_t arcount = 0;

  [[nodiscard]] bool is_response() const { return (flags & 0x8000) != 0; }
  [[nodiscard]] std::uint8_t rcode() const { return static_cast<std::uint8_t>(flags & 0x000F); }
};

struct Message {
  Header header;
  std::vector<Question> questions;
  std::vector<ResourceRecord> answers;
  std::vector<ResourceRecord> authorities;
  std::vector<ResourceRecord> additionals;
};

/// Full structural parse. Throws Error{MalformedDns}.
Message parse_message(ByteView bytes);

struct ResponseSummary {
  std::uint16_t id = 0;
  std::uint8_t rcode = 0;
  std::vector<ResourceRecord> answers;
  std::uint32_t min_ttl = kDefaultEmptyTtl;
};

ResponseSummary parse_response(ByteView bytes, std::uint32_t empty_answer_ttl = kDefaultEmptyTtl);

/// True iff the response echoes the sent question name byte-for-byte,
/// including letter case.
bool verify_0x20(ByteView query_sent, ByteView response);

/// Builds a response to `query`: copies its ID and question section verbatim,
/// sets QR/RD/RA and rcode, and appends answers. An answer whose name matches
/// the question (case-insensitively) is emitted as a pointer to it.
Bytes build_response(ByteView query, std::uint8_t rcode, const std::vector<ResourceRecord>& answers);

/// Overwrites the response's question section with the query's when they
/// name the same question, so a cached answer echoes the asker's casing.
/// Returns false (leaving response untouched) when they differ.
bool copy_question_section(Bytes& response, ByteView query);

std::uint16_t read_id(ByteView message);
void write_id(Bytes& message, std::uint16_t id);

/// Dotted-quad for A, RFC 5952-ish for AAAA, hex otherwise.
std::string format_rdata(std::uint16_t type, ByteView rdata);

std::string to_lower(std::string_view s);

}  // namespace odoh::dns
