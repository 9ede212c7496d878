#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace odoh {

enum class ErrorCode {
  InvalidArgument,
  // protocol
  UnsupportedSuite,
  MalformedConfig,
  MalformedMessage,
  MalformedPlaintext,
  UnknownKeyId,
  DecryptFailure,
  CryptoFailure,
  BadKeyLength,
  ContextConsumed,
  // dns
  MalformedDns,
  NameTooLong,
  LabelTooLong,
  // upstream / transport
  UpstreamUnreachable,
  UpstreamTimeout,
  UpstreamBadStatus,
  HttpStatus,
  // client
  DiscoveryFailed,
  NoSupportedSuite,
  ProbeFailed,
  VerifyFailure,
  // bench
  ConfigInvalid,
  EndpointUnreachable,
  EmptySamples,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace odoh
