#pragma once

#include <memory>
#include <string>
#include <thread>

#include "httplib_config.hpp"
#include "odoh/net.hpp"

namespace odoh::net {

/// Owns an httplib::Server and the thread running its accept loop.
class ServerRunner {
 public:
  explicit ServerRunner(std::size_t worker_threads = 64);
  ~ServerRunner();
  ServerRunner(const ServerRunner&) = delete;
  ServerRunner& operator=(const ServerRunner&) = delete;

  httplib::Server& server() { return server_; }

  /// Binds host:port (port 0 picks a free one), starts serving, and returns the
  /// bound port. Throws Error{InvalidArgument} if the bind fails.
  int start(const std::string& host, int port);
  /// Also cuts idle keep-alive connections instead of waiting out their
  /// timeout.
  void stop();
  [[nodiscard]] int port() const { return port_; }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

void reply(httplib::Response& res, const HttpResult& result);

/// Copies request headers, dropping the synthetic ones httplib adds.
HeaderList request_headers(const httplib::Request& req);

}  // namespace odoh::net
