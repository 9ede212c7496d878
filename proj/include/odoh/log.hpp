#pragma once

#include <functional>
#include <string>
#include <string_view>

namespace odoh {

enum class LogLevel { Debug, Info, Warn, Error };

std::string_view log_level_name(LogLevel level);

/// Line-oriented logger with a pluggable sink. Services never pass client
/// addresses or payload bytes to it.
class Logger {
 public:
  using Sink = std::function<void(LogLevel, std::string_view)>;

  Logger();  // stderr, Info and above
  explicit Logger(Sink sink, LogLevel min_level = LogLevel::Info);

  static Logger null();

  void log(LogLevel level, std::string_view message) const;
  void debug(std::string_view m) const { log(LogLevel::Debug, m); }
  void info(std::string_view m) const { log(LogLevel::Info, m); }
  void warn(std::string_view m) const { log(LogLevel::Warn, m); }
  void error(std::string_view m) const { log(LogLevel::Error, m); }

 private:
  Sink sink_;
  LogLevel min_level_ = LogLevel::Info;
};

}  // namespace odoh
