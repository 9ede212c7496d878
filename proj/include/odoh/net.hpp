#pragma once

#include <atomic>
#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "odoh/bytes.hpp"

namespace odoh::net {

using HeaderList = std::vector<std::pair<std::string, std::string>>;

struct Url {
  std::string scheme = "https";
  std::string host;
  int port = 443;
  std::string path = "/";

  /// Accepts "scheme://host[:port][/path]" or bare "host[:port][/path]", in
  /// which case default_scheme applies. Throws Error{InvalidArgument}.
  static Url parse(std::string_view text, std::string_view default_scheme = "https");

  /// scheme://host:port
  [[nodiscard]] std::string origin() const;
  /// host, or host:port when the port is not the scheme default.
  [[nodiscard]] std::string authority() const;
  [[nodiscard]] std::string str() const { return origin() + path; }
};

struct HttpResult {
  int status = 0;
  std::string content_type;
  Bytes body;
  HeaderList headers;
};

std::string url_encode(std::string_view s);

struct TransportOptions {
  /// Keep one persistent connection per origin (pooled when used concurrently).
  bool reuse_connections = true;
  std::chrono::milliseconds timeout{5000};
  /// Sleep applied whenever a new TCP connection is opened. Test harness knob
  /// that stands in for TLS handshake cost.
  std::chrono::milliseconds connect_delay{0};
  /// Source address to bind outgoing sockets to; empty for the default.
  std::string bind_address;
  /// Skip TLS certificate verification for https origins.
  bool insecure_tls = false;
};

/// HTTP/1.1 client with optional per-origin connection pooling. Thread-safe.
/// Transport failures throw Error{UpstreamUnreachable} or
/// Error{UpstreamTimeout}; any HTTP status is returned as a result.
class Transport {
 public:
  explicit Transport(TransportOptions options = {});
  ~Transport();
  Transport(const Transport&) = delete;
  Transport& operator=(const Transport&) = delete;

  HttpResult post(const Url& origin, const std::string& path_and_query, std::string_view content_type,
                  ByteView body, const HeaderList& headers = {});
  HttpResult get(const Url& origin, const std::string& path_and_query, const HeaderList& headers = {});

  /// Number of TCP connections opened so far.
  [[nodiscard]] std::size_t connections_opened() const { return connections_opened_->load(); }
  [[nodiscard]] const TransportOptions& options() const { return options_; }

 private:
  class Pool;
  HttpResult send(const Url& origin, const std::string& method, const std::string& path_and_query,
                  std::string_view content_type, ByteView body, const HeaderList& headers);

  TransportOptions options_;
  std::shared_ptr<std::atomic<std::size_t>> connections_opened_;
  std::unique_ptr<Pool> pool_;
};

}  // namespace odoh::net
