#pragma once

#include <string_view>

namespace loadshield {

// Log level comes from the LOADSHIELD_LOG environment variable:
// quiet | info (default) | debug. Messages go to stderr.
enum class LogLevel : int { quiet = 0, info = 1, debug = 2 };

LogLevel log_level();
void log_info(std::string_view msg);
void log_warn(std::string_view msg);
void log_debug(std::string_view msg);

}  // namespace loadshield
