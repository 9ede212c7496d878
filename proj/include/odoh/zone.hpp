#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "odoh/dns.hpp"

namespace odoh::dns {

/// Static authoritative data for the mock and co-located resolvers.
///
/// Text format, one record per line, '#' starts a comment:
///
///   name TYPE ttl rdata
///
/// rdata is a dotted quad for A, an IPv6 literal for AAAA, a hostname for
/// CNAME/NS, free text for TXT, and hex for HTTPS or any TYPEnnn.
class Zone {
 public:
  /// Throws Error{InvalidArgument} with the offending line number.
  static Zone parse(std::string_view text);
  static Zone load(const std::string& path);

  void add(ResourceRecord record);

  /// Answers a single-question query: matching records with NOERROR, an empty
  /// NOERROR when the name exists with other types, NXDOMAIN otherwise. The
  /// question section is echoed verbatim, preserving 0x20 casing. Throws
  /// Error{MalformedDns} for anything that is not a one-question query.
  [[nodiscard]] Bytes answer(ByteView query) const;

  [[nodiscard]] std::size_t size() const { return count_; }
  [[nodiscard]] std::vector<std::string> names() const;

 private:
  std::unordered_map<std::string, std::vector<ResourceRecord>> records_;
  std::size_t count_ = 0;
};

}  // namespace odoh::dns
