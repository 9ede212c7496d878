#include "odoh/log.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <mutex>

namespace odoh {

std::string_view log_level_name(LogLevel level) {
  switch (level) {
    case LogLevel::Debug: return "debug";
    case LogLevel::Info: return "info";
    case LogLevel::Warn: return "warn";
    case LogLevel::Error: return "error";
  }
  return "?";
}

namespace {

void stderr_sink(LogLevel level, std::string_view message) {
  static std::mutex mu;
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm);
  std::lock_guard lock(mu);
  std::fprintf(stderr, "%s %-5s %.*s\n", stamp, log_level_name(level).data(),
               static_cast<int>(message.size()), message.data());
}

}  // namespace

Logger::Logger() : sink_(stderr_sink) {}

Logger::Logger(Sink sink, LogLevel min_level) : sink_(std::move(sink)), min_level_(min_level) {}

Logger Logger::null() {
  return Logger([](LogLevel, std::string_view) {}, LogLevel::Error);
}

void Logger::log(LogLevel level, std::string_view message) const {
  if (level < min_level_ || !sink_) return;
  sink_(level, message);
}

}  // namespace odoh
