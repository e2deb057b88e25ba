#pragma once

#include <functional>
#include <string>

namespace fewshot {

enum class LogLevel { info, warning };

using LogSink = std::function<void(LogLevel, const std::string&)>;

// Replaces the process-wide sink (default: stderr). Returns the previous one.
LogSink set_log_sink(LogSink sink);

void log_info(const std::string& message);
void log_warning(const std::string& message);

}  // namespace fewshot
