#pragma once

// ODoH stub client: config discovery, route selection across proxy/target
// pairs, and single queries with a timing breakdown.

#include <chrono>
#include <functional>
#include <iosfwd>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "odoh/dns.hpp"
#include "odoh/error.hpp"
#include "odoh/log.hpp"
#include "odoh/net.hpp"
#include "odoh/protocol.hpp"

namespace odoh::client {

/// Median RTT reported for a pair whose probes all failed.
inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();
inline constexpr std::string_view kProbeName = "odoh.test";
inline constexpr std::string_view kDefaultTargetPath = "/dns-query";
/// HTTPS SvcParamKey carrying a serialized config list.
inline constexpr std::uint16_t kOdohConfigSvcParam = 32769;

enum class Strategy { RandomPair, FastestProxy, FastestPair };

std::optional<Strategy> parse_strategy(std::string_view name);
std::string_view strategy_name(Strategy s);

struct Route {
  /// Proxy endpoint URL, e.g. https://proxy.example/proxy.
  std::string proxy;
  /// Target authority, host[:port].
  std::string target;
  friend bool operator==(const Route&, const Route&) = default;
};

struct RouteSelection {
  Strategy strategy = Strategy::RandomPair;
  std::vector<std::string> proxies;
  std::vector<std::string> targets;
  int probe_count = 3;
  Route chosen;
  double median_rtt_ms = kUnreachable;
  /// Set when every probe failed and a random pair was used instead.
  bool fell_back = false;
};

/// Route file: "[proxies]" and "[targets]" sections, one entry per line,
/// '#' comments. Throws Error{InvalidArgument}.
struct RouteList {
  std::vector<std::string> proxies;
  std::vector<std::string> targets;

  static RouteList parse(std::string_view text);
  static RouteList load(const std::string& path);
};

/// A non-200 answer from the proxy or target.
class HttpStatusError : public Error {
 public:
  HttpStatusError(int status, const std::string& detail);
  [[nodiscard]] int status() const { return status_; }

 private:
  int status_;
};

struct ClientOptions {
  bool reuse_connections = true;
  /// Talk plain HTTP to proxies and targets (loopback testing).
  bool insecure_http = false;
  bool use_0x20 = false;
  std::chrono::milliseconds timeout{5000};
  std::string target_path{kDefaultTargetPath};
  /// Passed through to the transport; see net::TransportOptions.
  std::chrono::milliseconds connect_delay{0};
  std::string bind_address;
  bool insecure_tls = false;
  std::size_t padding = 0;
};

struct QueryTimings {
  double seal_us = 0;
  double rtt_ms = 0;
  double open_us = 0;
  double total_ms = 0;
};

struct QueryResult {
  dns::ResponseSummary summary;
  Bytes response;
  QueryTimings timings;
};

/// Picks the first config whose suite this build supports. Throws
/// Error{NoSupportedSuite}.
TargetKeyConfig choose_config(const std::vector<TargetKeyConfig>& configs);

/// Builds HTTPS RR rdata (priority 1, root target) with the config list as
/// the odoh SvcParam, and extracts it back. Used by the DNS discovery path.
Bytes make_https_rdata(ByteView config_list);
std::optional<Bytes> extract_config_list(ByteView https_rdata);

/// Holds the transport and the discovered target configs. Thread-safe.
class ClientSession {
 public:
  explicit ClientSession(ClientOptions options = {}, Logger logger = Logger());

  /// GETs the well-known config list twice and keeps the first supported
  /// suite; when the two fetches disagree, warns and keeps the newer one.
  /// Throws Error{DiscoveryFailed | NoSupportedSuite}.
  TargetKeyConfig discover_config(const std::string& target);

  /// Looks up odoh.test/HTTPS through a DoH resolver. No DNSSEC validation.
  TargetKeyConfig discover_config_dns(const std::string& bootstrap_doh_url);

  void set_config(const std::string& target, TargetKeyConfig config);
  [[nodiscard]] std::optional<TargetKeyConfig> config_for(const std::string& target) const;

  /// Full ODoH exchange through route.proxy to route.target, discovering the
  /// target's config on first use. Throws HttpStatusError, Error{DecryptFailure},
  /// Error{VerifyFailure}, and transport errors.
  QueryResult query(const Route& route, const dns::Question& question);

  /// POSTs an arbitrary body through the proxy to route.target at
  /// target_path (options().target_path when empty).
  net::HttpResult relay(const Route& route, std::string_view content_type, ByteView body,
                        std::string_view target_path = {});

  [[nodiscard]] net::Transport& transport() { return *transport_; }
  [[nodiscard]] const ClientOptions& options() const { return options_; }

 private:
  net::Url target_url(const std::string& target, std::string_view path) const;
  TargetKeyConfig config_or_discover(const std::string& target);

  ClientOptions options_;
  Logger logger_;
  std::unique_ptr<net::Transport> transport_;
  mutable std::mutex mu_;
  std::map<std::string, TargetKeyConfig> configs_;
};

using ProbeFn = std::function<double(const Route&)>;

/// Median of `count` probe queries (odoh.test/A); kUnreachable if all fail.
double probe_latency(ClientSession& session, const Route& route, int count);

/// Lower median; kUnreachable when empty.
double median_ms(std::vector<double> samples);

/// Ties go to the earlier list position. Infinite probes rank last; when all
/// are infinite, falls back to a random pair and logs a warning.
RouteSelection select_route(Strategy strategy, const std::vector<std::string>& proxies,
                            const std::vector<std::string>& targets, int probe_count, const ProbeFn& probe,
                            std::mt19937_64& rng, const Logger& logger = Logger());

/// The dig-like front end. Returns the process exit code: 0 when a DNS
/// answer was obtained, 2 on usage errors, 1 otherwise.
int run_dig(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace odoh::client
