#pragma once

// Oblivious target: decrypts queries, answers them from a TTL cache or an
// upstream DoH resolver, and encrypts the answer under the client's key.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "odoh/log.hpp"
#include "odoh/net.hpp"
#include "odoh/protocol.hpp"
#include "odoh/zone.hpp"

namespace odoh::target {

using Clock = std::chrono::steady_clock;

struct CacheKey {
  std::string qname;  // lowercase
  std::uint16_t qtype = 0;
  std::uint16_t qclass = 0;

  friend bool operator==(const CacheKey&, const CacheKey&) = default;
};

struct CacheKeyHash {
  std::size_t operator()(const CacheKey& k) const noexcept;
};

struct CacheEntry {
  Bytes response_template;
  Clock::time_point expires_at;
};

/// LRU cache of DNS responses with per-entry TTL. Thread-safe. Capacity 0
/// disables caching (every get is a miss, puts are dropped).
class ResponseCache {
 public:
  using Now = std::function<Clock::time_point()>;

  static constexpr std::chrono::seconds kMinTtl{1};
  static constexpr std::chrono::seconds kMaxTtl{86400};

  explicit ResponseCache(std::size_t capacity, Now now = [] { return Clock::now(); });

  /// Live entries only; expired ones are dropped on sight. Counts hit/miss.
  std::optional<CacheEntry> get(const CacheKey& key);
  void put(const CacheKey& key, Bytes response, std::uint32_t min_ttl_seconds);

  [[nodiscard]] std::uint64_t hits() const { return hits_.load(); }
  [[nodiscard]] std::uint64_t misses() const { return misses_.load(); }
  [[nodiscard]] std::size_t size() const;
  [[nodiscard]] std::size_t capacity() const { return capacity_; }

 private:
  using Order = std::list<CacheKey>;
  struct Slot {
    CacheEntry entry;
    Order::iterator position;
  };

  const std::size_t capacity_;
  Now now_;
  mutable std::mutex mu_;
  Order lru_;  // front = most recently used
  std::unordered_map<CacheKey, Slot, CacheKeyHash> slots_;
  std::atomic<std::uint64_t> hits_{0};
  std::atomic<std::uint64_t> misses_{0};
};

/// A recursive resolver the target can forward a cleartext query to.
class Upstream {
 public:
  virtual ~Upstream() = default;
  /// Throws Error{UpstreamUnreachable | UpstreamTimeout | UpstreamBadStatus}.
  virtual Bytes resolve(ByteView query, std::chrono::milliseconds timeout) = 0;
  [[nodiscard]] virtual std::string name() const = 0;
};

/// POSTs application/dns-message to a DoH URL over a pooled transport.
class DohUpstream final : public Upstream {
 public:
  explicit DohUpstream(std::string url, bool insecure_tls = false);
  Bytes resolve(ByteView query, std::chrono::milliseconds timeout) override;
  [[nodiscard]] std::string name() const override { return url_.str(); }

 private:
  net::Url url_;
  bool insecure_tls_;
  std::mutex mu_;
  std::map<long long, std::unique_ptr<net::Transport>> transports_;  // keyed by timeout
};

/// Co-located resolver: answers from an in-process zone with no network hop.
class ZoneUpstream final : public Upstream {
 public:
  explicit ZoneUpstream(std::shared_ptr<const dns::Zone> zone) : zone_(std::move(zone)) {}
  Bytes resolve(ByteView query, std::chrono::milliseconds timeout) override;
  [[nodiscard]] std::string name() const override { return "zone"; }

 private:
  std::shared_ptr<const dns::Zone> zone_;
};

/// "zone:<path>" builds a ZoneUpstream from a zone file; anything else is a
/// DoH URL.
std::shared_ptr<Upstream> make_upstream(const std::string& spec, bool insecure_tls = false);

/// One-shot DoH POST. Non-2xx statuses raise Error{UpstreamBadStatus}.
Bytes resolve_upstream(ByteView query, const std::string& resolver_url, std::chrono::milliseconds timeout);

/// response_key[0] mod count.
std::size_t select_resolver(ByteView response_key, std::size_t count);

struct TargetConfig {
  /// Active key first; later keys stay decrypt-only for rotation.
  std::vector<TargetKeyPair> key_pairs;
  std::vector<std::string> upstream_resolvers;
  std::size_t cache_capacity = 10000;
  std::chrono::milliseconds upstream_timeout{2000};
  /// Per-transit delay for desk-scale topology emulation; applied on the way
  /// in and again on the way out by the HTTP layer.
  std::chrono::milliseconds injected_delay{0};
  /// Accept application/dns-message bodies and answer them in the clear. Only
  /// for the cleartext baseline of the benchmark harness.
  bool allow_cleartext = false;
  std::uint32_t empty_answer_ttl = dns::kDefaultEmptyTtl;

  /// Throws Error{ConfigInvalid}.
  void validate() const;
};

struct TargetMetrics {
  std::uint64_t queries_total = 0;
  std::uint64_t cache_hits = 0;
  std::uint64_t cache_misses = 0;
  std::uint64_t decrypt_failures = 0;
  std::uint64_t upstream_errors = 0;
};

class TargetService {
 public:
  /// Upstreams are built from config.upstream_resolvers unless given.
  explicit TargetService(TargetConfig config, std::vector<std::shared_ptr<Upstream>> upstreams = {},
                         Logger logger = Logger(), ResponseCache::Now now = [] { return Clock::now(); });

  net::HttpResult handle_odoh_request(ByteView body, std::string_view content_type);
  [[nodiscard]] net::HttpResult serve_configs() const;
  [[nodiscard]] TargetMetrics metrics() const;
  [[nodiscard]] std::string metrics_text() const;

  [[nodiscard]] const TargetConfig& config() const { return config_; }
  ResponseCache& cache() { return cache_; }

 private:
  /// Cache lookup, then upstream with one fallback. Returns the response
  /// with the query's ID, or an error status.
  struct Resolution {
    int status = 200;
    Bytes response;
  };
  Resolution resolve(ByteView dns_query, std::uint8_t selector);

  TargetConfig config_;
  std::vector<std::shared_ptr<Upstream>> upstreams_;
  Logger logger_;
  ResponseCache cache_;
  std::atomic<std::uint64_t> queries_total_{0};
  std::atomic<std::uint64_t> decrypt_failures_{0};
  std::atomic<std::uint64_t> upstream_errors_{0};
};

/// Called with every request the HTTP layer receives: headers, body, and the
/// peer address. For observability tests.
using RequestObserver =
    std::function<void(const net::HeaderList& headers, const std::string& body, const std::string& peer)>;

/// HTTP front end: POST /dns-query, GET /.well-known/odoh/configs,
/// GET /health, GET /metrics.
class TargetServer {
 public:
  explicit TargetServer(std::shared_ptr<TargetService> service);
  ~TargetServer();
  TargetServer(const TargetServer&) = delete;
  TargetServer& operator=(const TargetServer&) = delete;

  void set_observer(RequestObserver observer);
  /// Returns the bound port.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  void stop();
  [[nodiscard]] int port() const;
  [[nodiscard]] std::string host_port() const;
  TargetService& service() { return *service_; }

 private:
  struct Impl;
  std::shared_ptr<TargetService> service_;
  std::unique_ptr<Impl> impl_;
};

/// Key file: one key pair per line, "kem kdf aead secret_hex public_hex" with
/// identifiers in hex (e.g. "0x0020"). '#' comments allowed.
std::vector<TargetKeyPair> load_key_file(const std::string& path);
std::string format_key_file(std::span<const TargetKeyPair> key_pairs);

}  // namespace odoh::target
