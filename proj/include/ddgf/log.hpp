#pragma once

#include <string>

namespace ddgf {

// Verbosity from DDGF_LOG: 0 quiet, 1 warnings (default), 2 info, 3 debug.
int log_level();
void set_log_level(int level);

void log_warn(const std::string& msg);
void log_info(const std::string& msg);
void log_debug(const std::string& msg);

}  // namespace ddgf
