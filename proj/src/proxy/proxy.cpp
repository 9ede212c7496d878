#include "odoh/proxy.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <thread>

#include "../net/server_runner.hpp"
#include "odoh/error.hpp"
#include "odoh/protocol.hpp"

namespace odoh::proxy {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string media_type(std::string_view content_type) {
  auto out = lower(content_type.substr(0, content_type.find(';')));
  while (!out.empty() && std::isspace(static_cast<unsigned char>(out.back()))) out.pop_back();
  return out;
}

net::HttpResult failure(int status, std::string_view reason) {
  return {status, "text/plain", to_bytes(reason), {}};
}

std::string host_without_port(std::string_view authority) {
  if (!authority.empty() && authority.front() == '[') {
    return std::string(authority.substr(1, authority.find(']') - 1));
  }
  return lower(authority.substr(0, authority.rfind(':')));
}

}  // namespace

void ProxyConfig::validate() const {
  if (!(rate_limit_per_minute > 0)) throw Error(ErrorCode::ConfigInvalid, "rate limit must be > 0");
  if (!(burst >= 1)) throw Error(ErrorCode::ConfigInvalid, "burst must be >= 1");
  if (forward_timeout.count() <= 0) throw Error(ErrorCode::ConfigInvalid, "forward timeout must be positive");
  if (injected_delay.count() < 0) throw Error(ErrorCode::ConfigInvalid, "injected delay must be >= 0");
}

// ---- rate limiting ---------------------------------------------------------

RateLimiter::RateLimiter(double per_minute, double burst) : per_second_(per_minute / 60.0), burst_(burst) {}

bool RateLimiter::allow(const std::string& client_addr, Clock::time_point now) {
  std::lock_guard lock(mu_);
  auto [it, inserted] = buckets_.try_emplace(client_addr, Bucket{burst_, now});
  auto& b = it->second;
  if (!inserted && now > b.updated) {
    const double elapsed = std::chrono::duration<double>(now - b.updated).count();
    b.tokens = std::min(burst_, b.tokens + elapsed * per_second_);
    b.updated = now;
  }
  const bool ok = b.tokens >= 1.0;
  if (ok) b.tokens -= 1.0;
  if (buckets_.size() > 10000) prune(now);
  return ok;
}

void RateLimiter::prune(Clock::time_point now) {
  // A bucket that has refilled completely carries no state worth keeping.
  std::erase_if(buckets_, [&](const auto& kv) {
    const double elapsed = std::chrono::duration<double>(now - kv.second.updated).count();
    return kv.second.tokens + elapsed * per_second_ >= burst_;
  });
}

std::size_t RateLimiter::tracked_addresses() const {
  std::lock_guard lock(mu_);
  return buckets_.size();
}

// ---- headers ---------------------------------------------------------------

HeaderList sanitize_headers(const HeaderList& inbound, std::string_view target_host) {
  HeaderList out;
  for (const auto& [name, value] : inbound) {
    const auto key = lower(name);
    if (key == "content-type" || key == "content-length" || key == "accept") out.emplace_back(name, value);
  }
  out.emplace_back("Host", std::string(target_host));
  out.emplace_back("User-Agent", std::string(kUserAgent));
  return out;
}

// ---- forwarding ------------------------------------------------------------

HttpForwarder::HttpForwarder(bool insecure_tls) : insecure_tls_(insecure_tls) {}

net::HttpResult HttpForwarder::forward(const net::Url& target, const HeaderList& headers, ByteView body,
                                       std::chrono::milliseconds timeout) {
  net::Transport* transport = nullptr;
  {
    std::lock_guard lock(mu_);
    auto& slot = transports_[timeout.count()];
    if (!slot) {
      net::TransportOptions opts;
      opts.timeout = timeout;
      opts.insecure_tls = insecure_tls_;
      slot = std::make_unique<net::Transport>(opts);
    }
    transport = slot.get();
  }
  std::string content_type;
  HeaderList pass;
  for (const auto& [name, value] : headers) {
    const auto key = lower(name);
    if (key == "content-type") {
      content_type = value;
    } else if (key != "content-length") {
      pass.emplace_back(name, value);
    }
  }
  return transport->post(target, target.path, content_type, body, pass);
}

// ---- service ---------------------------------------------------------------

ProxyService::ProxyService(ProxyConfig config, std::shared_ptr<Forwarder> forwarder, Logger logger, Now now)
    : config_(std::move(config)),
      forwarder_(std::move(forwarder)),
      logger_(std::move(logger)),
      now_(std::move(now)),
      limiter_(config_.rate_limit_per_minute, config_.burst) {
  config_.validate();
}

net::HttpResult ProxyService::handle_proxy_request(const ProxyRequest& request) {
  if (!request.targethost || request.targethost->empty() || !request.targetpath || request.targetpath->empty()) {
    return failure(400, "missing targethost or targetpath");
  }
  const auto& host = *request.targethost;
  const auto& path = *request.targetpath;
  if (path.front() != '/' || host.find_first_of("/@?#") != std::string::npos) {
    return failure(400, "invalid targethost or targetpath");
  }
  if (request.body.size() > config_.max_body) return failure(413, "body too large");

  const auto media = media_type(request.content_type);
  const bool oblivious = media == kObliviousContentType;
  if (!oblivious && !(config_.allow_plain_doh && media == kDnsContentType)) {
    return failure(415, "unsupported content type");
  }
  if (!config_.allowed_targets.empty()) {
    const auto wanted = host_without_port(host);
    const bool listed = std::any_of(config_.allowed_targets.begin(), config_.allowed_targets.end(),
                                    [&](const std::string& t) { return lower(t) == lower(host) || lower(t) == wanted; });
    if (!listed) return failure(403, "target not allowed");
  }
  if (!limiter_.allow(request.client_addr, now_())) {
    rate_limited_.fetch_add(1);
    logger_.info("rate limited request");
    return failure(429, "rate limited");
  }

  net::Url url;
  try {
    url = net::Url::parse(host + path, config_.insecure_http ? "http" : "https");
  } catch (const Error&) {
    return failure(400, "invalid targethost");
  }

  auto headers = sanitize_headers(request.headers, url.authority());
  const bool has_type = std::any_of(headers.begin(), headers.end(),
                                    [](const auto& h) { return lower(h.first) == "content-type"; });
  if (!has_type) headers.emplace_back("Content-Type", request.content_type);

  try {
    auto result = forwarder_->forward(url, headers, request.body, config_.forward_timeout);
    forwards_.fetch_add(1);
    logger_.info("forwarded " + std::to_string(request.body.size()) + "B to " + url.authority() + " -> " +
                 std::to_string(result.status));
    return {result.status, result.content_type, std::move(result.body), {}};
  } catch (const Error& e) {
    upstream_errors_.fetch_add(1);
    logger_.warn("forward to " + url.authority() + " failed: " + std::string(error_code_name(e.code())));
    if (e.code() == ErrorCode::UpstreamTimeout) return failure(504, "target timeout");
    return failure(502, "target unreachable");
  }
}

ProxyMetrics ProxyService::metrics() const {
  return {forwards_.load(), rate_limited_.load(), upstream_errors_.load()};
}

std::string ProxyService::metrics_text() const {
  auto m = metrics();
  std::ostringstream out;
  out << "forwards_total " << m.forwards_total << "\n"
      << "rate_limited_total " << m.rate_limited_total << "\n"
      << "upstream_errors_total " << m.upstream_errors_total << "\n";
  return out.str();
}

// ---- HTTP front end --------------------------------------------------------

struct ProxyServer::Impl {
  net::ServerRunner runner;
};

ProxyServer::ProxyServer(std::shared_ptr<ProxyService> service)
    : service_(std::move(service)), impl_(std::make_unique<Impl>()) {
  auto& srv = impl_->runner.server();
  auto* svc = service_.get();
  srv.Post("/proxy", [svc](const httplib::Request& req, httplib::Response& res) {
    ProxyRequest pr;
    if (req.has_param("targethost")) pr.targethost = req.get_param_value("targethost");
    if (req.has_param("targetpath")) pr.targetpath = req.get_param_value("targetpath");
    pr.body = to_bytes(req.body);
    pr.content_type = req.get_header_value("Content-Type");
    pr.headers = net::request_headers(req);
    pr.client_addr = req.remote_addr;
    const auto delay = svc->config().injected_delay;
    if (delay.count() > 0) std::this_thread::sleep_for(delay);
    auto result = svc->handle_proxy_request(pr);
    if (delay.count() > 0) std::this_thread::sleep_for(delay);
    net::reply(res, result);
  });
  srv.Get("/health", [](const httplib::Request&, httplib::Response& res) { res.set_content("ok", "text/plain"); });
  srv.Get("/metrics", [svc](const httplib::Request&, httplib::Response& res) {
    res.set_content(svc->metrics_text(), "text/plain");
  });
}

ProxyServer::~ProxyServer() { stop(); }

int ProxyServer::start(const std::string& host, int port) { return impl_->runner.start(host, port); }

void ProxyServer::stop() { impl_->runner.stop(); }

int ProxyServer::port() const { return impl_->runner.port(); }

std::string ProxyServer::url() const { return "http://127.0.0.1:" + std::to_string(port()) + "/proxy"; }

}  // namespace odoh::proxy
