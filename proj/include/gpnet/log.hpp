#pragma once

#include <string>

namespace gpnet {

enum class LogLevel { kError = 0, kInfo = 1, kDebug = 2 };

// Level comes from the GPNET_LOG environment variable (error|info|debug),
// read once; defaults to info.
LogLevel log_level();

void log_error(const std::string& msg);
void log_info(const std::string& msg);
void log_debug(const std::string& msg);

}  // namespace gpnet
