// Minimal stderr logger. Verbosity comes from the ALIGN_LOG environment
// variable: error, warn (default), info, debug.
#pragma once

#include <cstdio>

namespace align::log {

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

Level threshold();

bool enabled(Level level);

void write(Level level, const char* fmt, ...)
#if defined(__GNUC__)
    __attribute__((format(printf, 2, 3)))
#endif
    ;

}  // namespace align::log

#define ALIGN_LOG_ERROR(...) ::align::log::write(::align::log::Level::Error, __VA_ARGS__)
#define ALIGN_LOG_WARN(...) ::align::log::write(::align::log::Level::Warn, __VA_ARGS__)
#define ALIGN_LOG_INFO(...) ::align::log::write(::align::log::Level::Info, __VA_ARGS__)
#define ALIGN_LOG_DEBUG(...) ::align::log::write(::align::log::Level::Debug, __VA_ARGS__)
