#include <atomic>
#include <set>
#include <thread>

#include "net/server_runner.hpp"
#include "odoh/bench.hpp"
#include "odoh/proxy.hpp"
#include "odoh/target.hpp"

namespace odoh::bench {

struct MockResolverServer::Impl {
  net::ServerRunner runner;
  std::shared_ptr<const dns::Zone> zone;
  std::chrono::milliseconds delay;
  std::atomic<std::uint64_t> requests{0};
};

MockResolverServer::MockResolverServer(std::shared_ptr<const dns::Zone> zone, std::chrono::milliseconds delay)
    : impl_(std::make_unique<Impl>()) {
  impl_->zone = std::move(zone);
  impl_->delay = delay;
  auto* impl = impl_.get();
  auto& srv = impl_->runner.server();
  srv.Post("/dns-query", [impl](const httplib::Request& req, httplib::Response& res) {
    impl->requests.fetch_add(1);
    if (impl->delay.count() > 0) std::this_thread::sleep_for(impl->delay);
    if (req.get_header_value("Content-Type") != kDnsContentType) {
      res.status = 415;
      res.set_content("unsupported content type", "text/plain");
      return;
    }
    try {
      res.set_content(to_string(impl->zone->answer(as_bytes(req.body))), std::string(kDnsContentType));
    } catch (const Error& e) {
      res.status = 400;
      res.set_content(e.what(), "text/plain");
    }
  });
  srv.Get("/health", [](const httplib::Request&, httplib::Response& res) { res.set_content("ok", "text/plain"); });
}

MockResolverServer::~MockResolverServer() { stop(); }

int MockResolverServer::start(const std::string& host, int port) { return impl_->runner.start(host, port); }

void MockResolverServer::stop() { impl_->runner.stop(); }

int MockResolverServer::port() const { return impl_->runner.port(); }

std::string MockResolverServer::url() const { return "http://127.0.0.1:" + std::to_string(port()) + "/dns-query"; }

std::uint64_t MockResolverServer::requests() const { return impl_->requests.load(); }

dns::Zone synthetic_zone(const std::vector<std::string>& domains) {
  dns::Zone zone;
  std::set<std::string> seen;
  auto add = [&](const std::string& name, std::uint32_t ttl, Bytes address) {
    auto q = dns::make_question(name, dns::type::kA);
    if (!seen.insert(q.qname).second) return;
    zone.add({q.qname, dns::type::kA, dns::kClassIn, ttl, std::move(address)});
  };
  add("example.com", 300, {93, 184, 216, 34});
  add(std::string(client::kProbeName), 60, {192, 0, 2, 53});
  std::uint32_t i = 0;
  for (const auto& d : domains) {
    ++i;
    add(d, 300, {10, static_cast<std::uint8_t>(i >> 16), static_cast<std::uint8_t>(i >> 8), static_cast<std::uint8_t>(i)});
  }
  return zone;
}

struct LocalStack::Impl {
  TargetKeyPair key_pair;
  std::unique_ptr<MockResolverServer> resolver;
  std::unique_ptr<target::TargetServer> target;
  std::unique_ptr<target::TargetServer> coloc;
  std::unique_ptr<proxy::ProxyServer> proxy;
};

LocalStack::LocalStack(LocalStackOptions options) : impl_(std::make_unique<Impl>()) {
  auto zone = std::make_shared<const dns::Zone>(synthetic_zone(options.domains));
  impl_->key_pair = generate_key_pair(options.suite);

  impl_->resolver = std::make_unique<MockResolverServer>(zone, options.resolver_delay);
  impl_->resolver->start();

  target::TargetConfig tc;
  tc.key_pairs = {impl_->key_pair};
  tc.upstream_resolvers = {impl_->resolver->url()};
  tc.cache_capacity = options.target_cache_capacity;
  tc.injected_delay = options.target_delay;
  tc.allow_cleartext = true;
  impl_->target = std::make_unique<target::TargetServer>(
      std::make_shared<target::TargetService>(tc, std::vector<std::shared_ptr<target::Upstream>>{}, options.logger));
  impl_->target->start();

  auto coloc_config = tc;
  coloc_config.upstream_resolvers.clear();
  impl_->coloc = std::make_unique<target::TargetServer>(std::make_shared<target::TargetService>(
      coloc_config, std::vector<std::shared_ptr<target::Upstream>>{std::make_shared<target::ZoneUpstream>(zone)},
      options.logger));
  impl_->coloc->start();

  proxy::ProxyConfig pc;
  pc.insecure_http = true;
  pc.allow_plain_doh = true;
  pc.injected_delay = options.proxy_delay;
  // Every worker shares the loopback address, so the limiter must not bite.
  pc.rate_limit_per_minute = 1e9;
  pc.burst = 1e6;
  impl_->proxy = std::make_unique<proxy::ProxyServer>(
      std::make_shared<proxy::ProxyService>(pc, std::make_shared<proxy::HttpForwarder>(), options.logger));
  impl_->proxy->start();
}

LocalStack::~LocalStack() {
  impl_->proxy->stop();
  impl_->coloc->stop();
  impl_->target->stop();
  impl_->resolver->stop();
}

Endpoints LocalStack::endpoints() const {
  return {impl_->resolver->url(), impl_->proxy->url(), impl_->target->host_port(), impl_->coloc->host_port()};
}

target::TargetServer& LocalStack::target() { return *impl_->target; }

proxy::ProxyServer& LocalStack::proxy() { return *impl_->proxy; }

MockResolverServer& LocalStack::resolver() { return *impl_->resolver; }

const TargetKeyPair& LocalStack::key_pair() const { return impl_->key_pair; }

}  // namespace odoh::bench
