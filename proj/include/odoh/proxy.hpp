#pragma once

// Oblivious proxy: relays opaque bodies to a client-named target with the
// client's identity stripped, under a per-address token-bucket rate limit.

#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "odoh/log.hpp"
#include "odoh/net.hpp"

namespace odoh::proxy {

using Clock = std::chrono::steady_clock;
using net::HeaderList;

inline constexpr std::string_view kUserAgent = "odoh-proxy/1.0";

struct ProxyConfig {
  /// Empty means any target may be named.
  std::vector<std::string> allowed_targets;
  double rate_limit_per_minute = 300;
  double burst = 50;
  std::chrono::milliseconds forward_timeout{5000};
  /// Per-transit delay, applied before forwarding and again before replying.
  std::chrono::milliseconds injected_delay{0};
  /// Forward over plain HTTP instead of HTTPS (loopback testing).
  bool insecure_http = false;
  /// Also relay application/dns-message bodies. Only for the proxied-DoH and
  /// cleartext baselines of the benchmark harness.
  bool allow_plain_doh = false;
  std::size_t max_body = 8192;

  /// Throws Error{ConfigInvalid}.
  void validate() const;
};

/// Token bucket per client address: capacity = burst, refill = rate/60 per
/// second. Thread-safe.
class RateLimiter {
 public:
  RateLimiter(double per_minute, double burst);

  /// Takes one token if available.
  bool allow(const std::string& client_addr, Clock::time_point now);
  [[nodiscard]] std::size_t tracked_addresses() const;

 private:
  struct Bucket {
    double tokens;
    Clock::time_point updated;
  };
  void prune(Clock::time_point now);

  double per_second_;
  double burst_;
  mutable std::mutex mu_;
  std::unordered_map<std::string, Bucket> buckets_;
};

enum class Verdict { Allow, Deny };

inline Verdict rate_limit_check(RateLimiter& limiter, const std::string& client_addr, Clock::time_point now) {
  return limiter.allow(client_addr, now) ? Verdict::Allow : Verdict::Deny;
}

/// Keeps only Content-Type, Content-Length and Accept from the inbound set,
/// then adds Host (the target) and a fixed User-Agent.
HeaderList sanitize_headers(const HeaderList& inbound, std::string_view target_host);

/// Outbound leg of the proxy. Throws Error{UpstreamUnreachable} or
/// Error{UpstreamTimeout}.
class Forwarder {
 public:
  virtual ~Forwarder() = default;
  virtual net::HttpResult forward(const net::Url& target, const HeaderList& headers, ByteView body,
                                  std::chrono::milliseconds timeout) = 0;
};

/// Forwards over pooled, reused HTTP(S) connections.
class HttpForwarder final : public Forwarder {
 public:
  explicit HttpForwarder(bool insecure_tls = false);
  net::HttpResult forward(const net::Url& target, const HeaderList& headers, ByteView body,
                          std::chrono::milliseconds timeout) override;

 private:
  bool insecure_tls_;
  std::mutex mu_;
  std::map<long long, std::unique_ptr<net::Transport>> transports_;
};

struct ProxyRequest {
  std::optional<std::string> targethost;
  std::optional<std::string> targetpath;
  Bytes body;
  std::string content_type;
  HeaderList headers;
  std::string client_addr;
};

struct ProxyMetrics {
  std::uint64_t forwards_total = 0;
  std::uint64_t rate_limited_total = 0;
  std::uint64_t upstream_errors_total = 0;
};

class ProxyService {
 public:
  using Now = std::function<Clock::time_point()>;

  ProxyService(ProxyConfig config, std::shared_ptr<Forwarder> forwarder, Logger logger = Logger(),
               Now now = [] { return Clock::now(); });

  /// Never inspects body bytes beyond their count.
  net::HttpResult handle_proxy_request(const ProxyRequest& request);

  [[nodiscard]] ProxyMetrics metrics() const;
  [[nodiscard]] std::string metrics_text() const;
  [[nodiscard]] const ProxyConfig& config() const { return config_; }

 private:
  ProxyConfig config_;
  std::shared_ptr<Forwarder> forwarder_;
  Logger logger_;
  Now now_;
  RateLimiter limiter_;
  std::atomic<std::uint64_t> forwards_{0};
  std::atomic<std::uint64_t> rate_limited_{0};
  std::atomic<std::uint64_t> upstream_errors_{0};
};

/// HTTP front end: POST /proxy?targethost=..&targetpath=.., GET /health,
/// GET /metrics.
class ProxyServer {
 public:
  explicit ProxyServer(std::shared_ptr<ProxyService> service);
  ~ProxyServer();
  ProxyServer(const ProxyServer&) = delete;
  ProxyServer& operator=(const ProxyServer&) = delete;

  int start(const std::string& host = "127.0.0.1", int port = 0);
  void stop();
  [[nodiscard]] int port() const;
  /// http://127.0.0.1:<port>/proxy
  [[nodiscard]] std::string url() const;
  ProxyService& service() { return *service_; }

 private:
  struct Impl;
  std::shared_ptr<ProxyService> service_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace odoh::proxy
