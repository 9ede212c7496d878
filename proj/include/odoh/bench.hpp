#pragma once

// Measurement harness: crypto and wire-size micro benchmarks, a paced
// multi-worker load generator across protocol modes, a mock DoH resolver,
// and CSV / percentile / CDF reporting.

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "odoh/client.hpp"
#include "odoh/log.hpp"
#include "odoh/protocol.hpp"
#include "odoh/zone.hpp"

namespace odoh::target {
class TargetServer;
}
namespace odoh::proxy {
class ProxyServer;
}

namespace odoh::bench {

enum class Mode { Doh, Pdoh, Odoh, CleartextOdoh, OdohColoc };

std::optional<Mode> parse_mode(std::string_view name);
std::string_view mode_name(Mode m);

struct Endpoints {
  /// DoH URL of the recursive resolver, e.g. http://127.0.0.1:5353/dns-query.
  std::string resolver_url;
  /// Proxy endpoint URL.
  std::string proxy_url;
  /// Target authority (host[:port]).
  std::string target;
  /// Target with an in-process resolver, for odoh-coloc.
  std::string coloc_target;
};

struct BenchConfig {
  int clients = 1;
  int queries = 1;
  double rate_per_minute = 15;
  Mode mode = Mode::Odoh;
  std::vector<std::string> domains;
  bool reuse_connections = true;
  bool insecure_http = false;
  Endpoints endpoints;
  /// Inter-arrival jitter as a fraction of 60/R.
  double jitter = 0.10;
  std::uint64_t seed = 1;
  std::chrono::milliseconds timeout{5000};
  std::chrono::milliseconds connect_delay{0};

  /// Throws Error{ConfigInvalid}.
  void validate() const;
};

struct LatencySample {
  std::int64_t timestamp_ms = 0;  // Unix epoch
  Mode mode = Mode::Odoh;
  std::string domain;
  double total_ms = 0;
  double seal_us = 0;
  double open_us = 0;
  /// 0 when no usable response arrived (transport, decrypt or parse error).
  int http_status = 0;
};

struct ModeSummary {
  Mode mode = Mode::Odoh;
  std::size_t count = 0;
  std::size_t failures = 0;
  double mean_ms = 0;
  double p50_ms = 0;
  double p90_ms = 0;
  double p95_ms = 0;
  double p99_ms = 0;
  [[nodiscard]] double failure_rate() const { return count ? static_cast<double>(failures) / count : 0; }
};

struct CdfPoint {
  double total_ms;
  double cum_fraction;
};

struct BenchReport {
  std::vector<ModeSummary> modes;
  std::vector<CdfPoint> cdf;
};

/// Nearest rank: the smallest sample with at least p% of samples <= it.
/// Throws Error{EmptySamples}.
double percentile(std::vector<double> samples, double p);
double mean(const std::vector<double>& samples);
std::vector<CdfPoint> cdf(std::vector<double> samples);

/// Summaries are over successful (HTTP 200) samples; the CDF covers all
/// successful samples regardless of mode. Throws Error{EmptySamples}.
BenchReport summarize(const std::vector<LatencySample>& samples);

inline constexpr std::string_view kCsvHeader = "timestamp,mode,domain,total_ms,seal_us,open_us,http_status";

void write_csv(std::ostream& out, const std::vector<LatencySample>& samples);
void write_cdf(std::ostream& out, const std::vector<CdfPoint>& points);
std::string format_summary(const BenchReport& report);

/// Writes samples.csv, summary.txt and cdf.csv into out_dir (created if
/// missing) and returns the report.
BenchReport emit_report(const std::vector<LatencySample>& samples, const std::string& out_dir);

/// One line per domain, '#' comments. Throws Error{ConfigInvalid} when empty.
std::vector<std::string> load_domains(const std::string& path);

/// Runs C workers of N paced queries each. Checks every endpoint the mode
/// needs first and throws Error{EndpointUnreachable} before spawning.
/// Returns exactly C*N samples, failures included.
std::vector<LatencySample> run_load(const BenchConfig& config, const Logger& logger = Logger());

struct CryptoBenchResult {
  std::size_t iterations = 0;
  double seal_p50_us = 0;
  double seal_p99_us = 0;
  double open_p50_us = 0;
  double open_p99_us = 0;
  /// Query seal+open plus response seal+open, per iteration.
  double lifecycle_p50_us = 0;
  double lifecycle_p99_us = 0;
};

inline constexpr std::size_t kMinCryptoIterations = 1000;

/// Seals and opens random type-A queries for distinct names, each under a
/// fresh target key. Throws Error{InvalidArgument} below kMinCryptoIterations.
CryptoBenchResult micro_crypto_bench(const CipherSuite& suite, std::size_t iterations);

struct SizeBenchResult {
  std::size_t count = 0;
  double mean_query_bytes = 0;
  double mean_odoh_query_bytes = 0;
  /// Serialized ODoH query minus DNS query; constant for a suite.
  std::size_t query_overhead = 0;
  /// Encrypted response body minus DNS response.
  std::size_t response_overhead = 0;
};

/// Throws Error{ConfigInvalid} for an empty list, and Error{CryptoFailure}
/// if the overhead is not the same for every domain.
SizeBenchResult micro_size_bench(const std::vector<std::string>& domains, const CipherSuite& suite);

/// A DoH resolver answering from a zone: POST /dns-query, GET /health.
class MockResolverServer {
 public:
  MockResolverServer(std::shared_ptr<const dns::Zone> zone, std::chrono::milliseconds delay);
  ~MockResolverServer();
  MockResolverServer(const MockResolverServer&) = delete;
  MockResolverServer& operator=(const MockResolverServer&) = delete;

  int start(const std::string& host = "127.0.0.1", int port = 0);
  void stop();
  [[nodiscard]] int port() const;
  /// http://127.0.0.1:<port>/dns-query
  [[nodiscard]] std::string url() const;
  [[nodiscard]] std::uint64_t requests() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// A zone with one A record per domain (TTL 300) plus odoh.test and
/// example.com.
dns::Zone synthetic_zone(const std::vector<std::string>& domains);

/// Loopback deployment: mock resolver, target, co-located target, proxy.
struct LocalStackOptions {
  std::chrono::milliseconds proxy_delay{0};
  std::chrono::milliseconds target_delay{0};
  std::chrono::milliseconds resolver_delay{0};
  std::vector<std::string> domains;
  CipherSuite suite = CipherSuite::default_suite();
  /// Off by default so mode comparisons all reach the resolver.
  std::size_t target_cache_capacity = 0;
  Logger logger = Logger::null();
};

class LocalStack {
 public:
  explicit LocalStack(LocalStackOptions options);
  ~LocalStack();
  LocalStack(const LocalStack&) = delete;
  LocalStack& operator=(const LocalStack&) = delete;

  [[nodiscard]] Endpoints endpoints() const;
  [[nodiscard]] target::TargetServer& target();
  [[nodiscard]] proxy::ProxyServer& proxy();
  [[nodiscard]] MockResolverServer& resolver();
  [[nodiscard]] const TargetKeyPair& key_pair() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace odoh::bench
