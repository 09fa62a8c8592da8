#pragma once

#include <string_view>

namespace eprsim::cli {

enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };

// Read once from EPRSIM_LOG (error|warn|info|debug, default warn).
LogLevel log_level();
LogLevel parse_log_level(std::string_view text);

void log(LogLevel level, std::string_view message);

}  // namespace eprsim::cli
