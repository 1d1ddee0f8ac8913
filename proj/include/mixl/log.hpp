#pragma once

#include <string>

namespace mixl {

// Stderr logging gated by the MIXLOGIT_LOG environment variable:
// off | warn (default) | info | debug.
enum class LogLevel { Off = 0, Warn = 1, Info = 2, Debug = 3 };

LogLevel log_level();
void log_warn(const std::string& msg);
void log_info(const std::string& msg);
void log_debug(const std::string& msg);

}  // namespace mixl
