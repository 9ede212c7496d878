#include <cctype>
#include <chrono>
#include <thread>

#include "httplib_config.hpp"
#include "odoh/error.hpp"
#include "odoh/net.hpp"

namespace odoh::net {

namespace {

int default_port(std::string_view scheme) { return scheme == "http" ? 80 : 443; }

}  // namespace

Url Url::parse(std::string_view text, std::string_view default_scheme) {
  Url u;
  u.scheme = std::string(default_scheme);
  auto sep = text.find("://");
  if (sep != std::string_view::npos) {
    u.scheme = std::string(text.substr(0, sep));
    text.remove_prefix(sep + 3);
  }
  if (u.scheme != "http" && u.scheme != "https") {
    throw Error(ErrorCode::InvalidArgument, "unsupported URL scheme: " + u.scheme);
  }
  auto slash = text.find('/');
  std::string_view hostport = text.substr(0, slash);
  u.path = slash == std::string_view::npos ? "/" : std::string(text.substr(slash));
  u.port = default_port(u.scheme);
  if (!hostport.empty() && hostport.front() == '[') {
    auto close = hostport.find(']');
    if (close == std::string_view::npos) throw Error(ErrorCode::InvalidArgument, "bad IPv6 literal");
    u.host = std::string(hostport.substr(1, close - 1));
    hostport.remove_prefix(close + 1);
    if (!hostport.empty() && hostport.front() == ':') {
      u.port = std::stoi(std::string(hostport.substr(1)));
    }
  } else {
    auto colon = hostport.rfind(':');
    u.host = std::string(hostport.substr(0, colon));
    if (colon != std::string_view::npos) {
      try {
        u.port = std::stoi(std::string(hostport.substr(colon + 1)));
      } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidArgument, "bad port in URL");
      }
    }
  }
  if (u.host.empty()) throw Error(ErrorCode::InvalidArgument, "URL has no host");
  if (u.port <= 0 || u.port > 65535) throw Error(ErrorCode::InvalidArgument, "port out of range");
  return u;
}

std::string Url::authority() const {
  std::string h = host.find(':') != std::string::npos ? "[" + host + "]" : host;
  if (port == default_port(scheme)) return h;
  return h + ":" + std::to_string(port);
}

std::string Url::origin() const {
  std::string h = host.find(':') != std::string::npos ? "[" + host + "]" : host;
  return scheme + "://" + h + ":" + std::to_string(port);
}

std::string url_encode(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~' || c == '/' || c == ':') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0xF]);
    }
  }
  return out;
}

class Transport::Pool {
 public:
  std::unique_ptr<httplib::Client> acquire(const std::string& origin) {
    std::lock_guard lock(mu_);
    auto& idle = idle_[origin];
    if (idle.empty()) return nullptr;
    auto c = std::move(idle.back());
    idle.pop_back();
    return c;
  }

  void release(const std::string& origin, std::unique_ptr<httplib::Client> client) {
    std::lock_guard lock(mu_);
    idle_[origin].push_back(std::move(client));
  }

 private:
  std::mutex mu_;
  std::map<std::string, std::vector<std::unique_ptr<httplib::Client>>> idle_;
};

Transport::Transport(TransportOptions options)
    : options_(std::move(options)),
      connections_opened_(std::make_shared<std::atomic<std::size_t>>(0)),
      pool_(std::make_unique<Pool>()) {}

Transport::~Transport() = default;

HttpResult Transport::post(const Url& origin, const std::string& path_and_query,
                           std::string_view content_type, ByteView body, const HeaderList& headers) {
  return send(origin, "POST", path_and_query, content_type, body, headers);
}

HttpResult Transport::get(const Url& origin, const std::string& path_and_query, const HeaderList& headers) {
  return send(origin, "GET", path_and_query, {}, {}, headers);
}

HttpResult Transport::send(const Url& origin, const std::string& method, const std::string& path_and_query,
                           std::string_view content_type, ByteView body, const HeaderList& headers) {
  const std::string key = origin.origin();
  std::unique_ptr<httplib::Client> client;
  if (options_.reuse_connections) client = pool_->acquire(key);
  if (!client) {
    client = std::make_unique<httplib::Client>(key);
    const auto timeout = options_.timeout;
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
    client->set_connection_timeout(secs.count(), usecs.count());
    client->set_read_timeout(secs.count(), usecs.count());
    client->set_write_timeout(secs.count(), usecs.count());
    client->set_keep_alive(options_.reuse_connections);
    if (!options_.bind_address.empty()) client->set_interface(options_.bind_address);
    if (options_.insecure_tls) client->enable_server_certificate_verification(false);
    auto counter = connections_opened_;
    auto delay = options_.connect_delay;
    client->set_socket_options([counter, delay](socket_t sock) {
      httplib::default_socket_options(sock);
      counter->fetch_add(1);
      if (delay.count() > 0) std::this_thread::sleep_for(delay);
    });
  }

  httplib::Headers h;
  for (const auto& [k, v] : headers) h.emplace(k, v);

  const auto started = std::chrono::steady_clock::now();
  httplib::Result res = method == "POST"
                            ? client->Post(path_and_query, h, reinterpret_cast<const char*>(body.data()),
                                           body.size(), std::string(content_type))
                            : client->Get(path_and_query, h);
  const auto elapsed = std::chrono::steady_clock::now() - started;

  if (!res) {
    const auto err = res.error();
    const bool timed_out = err == httplib::Error::ConnectionTimeout ||
                           ((err == httplib::Error::Read || err == httplib::Error::Write) &&
                            elapsed >= options_.timeout * 9 / 10);
    const std::string what = key + path_and_query + ": " + httplib::to_string(err);
    if (timed_out) throw Error(ErrorCode::UpstreamTimeout, what);
    throw Error(ErrorCode::UpstreamUnreachable, what);
  }

  HttpResult out;
  out.status = res->status;
  out.content_type = res->get_header_value("Content-Type");
  out.body = to_bytes(res->body);
  for (const auto& [k, v] : res->headers) out.headers.emplace_back(k, v);

  if (options_.reuse_connections) pool_->release(key, std::move(client));
  return out;
}

}  // namespace odoh::net
