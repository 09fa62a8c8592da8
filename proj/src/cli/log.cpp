#include "eprsim/cli/log.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

namespace eprsim::cli {

LogLevel parse_log_level(std::string_view text) {
  if (text == "error" || text == "0") return LogLevel::error;
  if (text == "info" || text == "2") return LogLevel::info;
  if (text == "debug" || text == "3") return LogLevel::debug;
  return LogLevel::warn;
}

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("EPRSIM_LOG");
    return env ? parse_log_level(env) : LogLevel::warn;
  }();
  return level;
}

void log(LogLevel level, std::string_view message) {
  if (level > log_level()) return;
  static std::mutex mu;
  static constexpr const char* kNames[] = {"error", "warning", "info", "debug"};
  std::lock_guard lock(mu);
  std::cerr << "eprsim: " << kNames[int(level)] << ": " << message << '\n';
}

}  // namespace eprsim::cli
