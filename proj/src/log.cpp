#include "mixl/log.hpp"

#include <cstdlib>
#include <iostream>

namespace mixl {

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("MIXLOGIT_LOG");
    if (env == nullptr || *env == '\0') return LogLevel::Warn;
    const std::string v(env);
    if (v == "off") return LogLevel::Off;
    if (v == "warn") return LogLevel::Warn;
    if (v == "info") return LogLevel::Info;
    if (v == "debug") return LogLevel::Debug;
    return LogLevel::Warn;
  }();
  return level;
}

namespace {

void emit(LogLevel at, const char* tag, const std::string& msg) {
  if (log_level() >= at) std::cerr << tag << msg << "\n";
}

}  // namespace

void log_warn(const std::string& msg) { emit(LogLevel::Warn, "warning: ", msg); }
void log_info(const std::string& msg) { emit(LogLevel::Info, "info: ", msg); }
void log_debug(const std::string& msg) { emit(LogLevel::Debug, "debug: ", msg); }

}  // namespace mixl
