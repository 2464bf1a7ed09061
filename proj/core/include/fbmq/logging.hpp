#pragma once

#include <string>

namespace fbmq {

using LogHandler = void (*)(const std::string& message);

// Warnings (eigenvalue clipping, horizon truncation bounds) go to stderr by
// default; tests may install a silent or capturing handler.
void set_log_handler(LogHandler handler);
void log_warning(const std::string& message);

}  // namespace fbmq
