#include "loadshield/log.hpp"

#include <cstdlib>
#include <iostream>
#include <string>

namespace loadshield {

LogLevel log_level() {
    static const LogLevel level = [] {
        const char* env = std::getenv("LOADSHIELD_LOG");
        if (!env) return LogLevel::info;
        const std::string v(env);
        if (v == "quiet") return LogLevel::quiet;
        if (v == "debug") return LogLevel::debug;
        return LogLevel::info;
    }();
    return level;
}

void log_info(std::string_view msg) {
    if (log_level() >= LogLevel::info) std::cerr << "[info] " << msg << '\n';
}

void log_warn(std::string_view msg) {
    if (log_level() >= LogLevel::info) std::cerr << "[warn] " << msg << '\n';
}

void log_debug(std::string_view msg) {
    if (log_level() >= LogLevel::debug) std::cerr << "[debug] " << msg << '\n';
}

}  // namespace loadshield
