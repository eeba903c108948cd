#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace microasm {

enum class LogLevel { quiet = 0, warn = 1, info = 2, debug = 3 };

// Verbosity comes from the MICROASM_LOG environment variable
// (quiet|warn|info|debug). Default: warn.
inline LogLevel log_level() {
    static LogLevel level = [] {
        const char* env = std::getenv("MICROASM_LOG");
        if (!env) return LogLevel::warn;
        if (std::strcmp(env, "quiet") == 0) return LogLevel::quiet;
        if (std::strcmp(env, "info") == 0) return LogLevel::info;
        if (std::strcmp(env, "debug") == 0) return LogLevel::debug;
        return LogLevel::warn;
    }();
    return level;
}

template <typename... Args>
inline void log_at(LogLevel lvl, const char* tag, const char* fmt, Args... args) {
    if (log_level() < lvl) return;
    if constexpr (sizeof...(Args) == 0) {
        std::fprintf(stderr, "[%s] %s\n", tag, fmt);
    } else {
        std::fprintf(stderr, "[%s] ", tag);
        std::fprintf(stderr, fmt, args...);
        std::fputc('\n', stderr);
    }
}

template <typename... Args>
inline void log_warn(const char* fmt, Args... args) {
    log_at(LogLevel::warn, "warn", fmt, args...);
}
template <typename... Args>
inline void log_info(const char* fmt, Args... args) {
    log_at(LogLevel::info, "info", fmt, args...);
}
template <typename... Args>
inline void log_debug(const char* fmt, Args... args) {
    log_at(LogLevel::debug, "debug", fmt, args...);
}

} // namespace microasm
