#pragma once

#include <csignal>
#include <string>
#include <utility>

#include "odoh/error.hpp"

namespace odoh::tools {

/// "host:port" or ":port" (loopback). Throws Error{ConfigInvalid}.
inline std::pair<std::string, int> parse_listen(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos) throw Error(ErrorCode::ConfigInvalid, "listen must be host:port, got " + text);
  std::string host = text.substr(0, colon);
  if (host.empty()) host = "127.0.0.1";
  try {
    return {host, std::stoi(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw Error(ErrorCode::ConfigInvalid, "bad port in " + text);
  }
}

/// Blocks until SIGINT or SIGTERM. Call before starting any threads so they
/// inherit the blocked mask.
class SignalWaiter {
 public:
  SignalWaiter() {
    sigemptyset(&set_);
    sigaddset(&set_, SIGINT);
    sigaddset(&set_, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set_, nullptr);
  }
  int wait() {
    int sig = 0;
    sigwait(&set_, &sig);
    return sig;
  }

 private:
  sigset_t set_{};
};

}  // namespace odoh::tools
