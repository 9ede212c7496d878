#include "server_runner.hpp"

#include <arpa/inet.h>
#include <sys/socket.h>

#include <filesystem>

#include "odoh/error.hpp"

namespace odoh::net {

namespace {

/// Shuts down every socket in this process whose local port is `port`. After
/// the listener is closed those are exactly the server's accepted
/// connections.
void shutdown_accepted(int port) {
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator("/proc/self/fd", ec)) {
    int fd = -1;
    try {
      fd = std::stoi(entry.path().filename().string());
    } catch (const std::exception&) {
      continue;
    }
    sockaddr_storage addr{};
    socklen_t len = sizeof(addr);
    if (::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len) != 0) continue;
    int local_port = -1;
    if (addr.ss_family == AF_INET) {
      local_port = ntohs(reinterpret_cast<sockaddr_in*>(&addr)->sin_port);
    } else if (addr.ss_family == AF_INET6) {
      local_port = ntohs(reinterpret_cast<sockaddr_in6*>(&addr)->sin6_port);
    }
    if (local_port == port) ::shutdown(fd, SHUT_RDWR);
  }
}

}  // namespace

ServerRunner::ServerRunner(std::size_t worker_threads) {
  server_.new_task_queue = [worker_threads] { return new httplib::ThreadPool(worker_threads); };
  server_.set_keep_alive_max_count(100000);
  server_.set_keep_alive_timeout(30);
  server_.set_payload_max_length(1 << 20);
}

ServerRunner::~ServerRunner() { stop(); }

int ServerRunner::start(const std::string& host, int port) {
  if (port == 0) {
    port_ = server_.bind_to_any_port(host);
  } else {
    port_ = server_.bind_to_port(host, port) ? port : -1;
  }
  if (port_ <= 0) {
    throw Error(ErrorCode::InvalidArgument, "cannot bind " + host + ":" + std::to_string(port));
  }
  thread_ = std::thread([this] { server_.listen_after_bind(); });
  server_.wait_until_ready();
  return port_;
}

void ServerRunner::stop() {
  if (thread_.joinable()) {
    server_.stop();
    shutdown_accepted(port_);
    thread_.join();
  }
}

void reply(httplib::Response& res, const HttpResult& result) {
  res.status = result.status;
  for (const auto& [k, v] : result.headers) res.set_header(k, v);
  res.set_content(to_string(result.body), result.content_type.empty() ? "text/plain" : result.content_type);
}

HeaderList request_headers(const httplib::Request& req) {
  HeaderList out;
  for (const auto& [k, v] : req.headers) {
    if (k == "REMOTE_ADDR" || k == "REMOTE_PORT" || k == "LOCAL_ADDR" || k == "LOCAL_PORT") continue;
    out.emplace_back(k, v);
  }
  return out;
}

}  // namespace odoh::net
