#include "gpnet/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace gpnet {

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("GPNET_LOG");
    if (!env) return LogLevel::kInfo;
    if (std::strcmp(env, "error") == 0) return LogLevel::kError;
    if (std::strcmp(env, "debug") == 0) return LogLevel::kDebug;
    return LogLevel::kInfo;
  }();
  return level;
}

namespace {

void emit(const char* tag, const std::string& msg) {
  std::fprintf(stderr, "[%s] %s\n", tag, msg.c_str());
}

}  // namespace

void log_error(const std::string& msg) {
  emit("error", msg);
}

void log_info(const std::string& msg) {
  if (log_level() >= LogLevel::kInfo) emit("info", msg);
}

void log_debug(const std::string& msg) {
  if (log_level() >= LogLevel::kDebug) emit("debug", msg);
}

}  // namespace gpnet
