#include "odoh/error.hpp"

namespace odoh {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::UnsupportedSuite: return "unsupported-suite";
    case ErrorCode::MalformedConfig: return "malformed-config";
    case ErrorCode::MalformedMessage: return "malformed-message";
    case ErrorCode::MalformedPlaintext: return "malformed-plaintext";
    case ErrorCode::UnknownKeyId: return "unknown-key-id";
    case ErrorCode::DecryptFailure: return "decrypt-failure";
    case ErrorCode::CryptoFailure: return "crypto-failure";
    case ErrorCode::BadKeyLength: return "bad-key-length";
    case ErrorCode::ContextConsumed: return "context-consumed";
    case ErrorCode::MalformedDns: return "malformed-dns";
    case ErrorCode::NameTooLong: return "name-too-long";
    case ErrorCode::LabelTooLong: return "label-too-long";
    case ErrorCode::UpstreamUnreachable: return "upstream-unreachable";
    case ErrorCode::UpstreamTimeout: return "upstream-timeout";
    case ErrorCode::UpstreamBadStatus: return "upstream-bad-status";
    case ErrorCode::HttpStatus: return "http-status";
    case ErrorCode::DiscoveryFailed: return "discovery-failed";
    case ErrorCode::NoSupportedSuite: return "no-supported-suite";
    case ErrorCode::ProbeFailed: return "probe-failed";
    case ErrorCode::VerifyFailure: return "verify-failure";
    case ErrorCode::ConfigInvalid: return "config-invalid";
    case ErrorCode::EndpointUnreachable: return "endpoint-unreachable";
    case ErrorCode::EmptySamples: return "empty-samples";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

}  // namespace odoh
