#include "ddgf/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>

namespace ddgf {

namespace {

int initial_level() {
  const char* env = std::getenv("DDGF_LOG");
  if (env == nullptr || *env == '\0') return 1;
  return std::atoi(env);
}

std::atomic<int>& level_ref() {
  static std::atomic<int> level{initial_level()};
  return level;
}

void emit(int level, const char* tag, const std::string& msg) {
  if (level_ref().load() >= level) std::cerr << "[" << tag << "] " << msg << '\n';
}

}  // namespace

int log_level() { return level_ref().load(); }
void set_log_level(int level) { level_ref().store(level); }

void log_warn(const std::string& msg) { emit(1, "warn", msg); }
void log_info(const std::string& msg) { emit(2, "info", msg); }
void log_debug(const std::string& msg) { emit(3, "debug", msg); }

}  // namespace ddgf
