#include "fewshot/log.hpp"

#include <iostream>
#include <mutex>

namespace fewshot {
namespace {

std::mutex& sink_mutex() {
  static std::mutex mu;
  return mu;
}

LogSink& sink() {
  static LogSink current = [](LogLevel level, const std::string& message) {
    std::cerr << (level == LogLevel::warning ? "[warning] " : "[info] ") << message << '\n';
  };
  return current;
}

void emit(LogLevel level, const std::string& message) {
  std::lock_guard lock(sink_mutex());
  if (sink()) sink()(level, message);
}

}  // namespace

LogSink set_log_sink(LogSink next) {
  std::lock_guard lock(sink_mutex());
  auto previous = std::move(sink());
  sink() = std::move(next);
  return previous;
}

void log_info(const std::string& message) { emit(LogLevel::info, message); }
void log_warning(const std::string& message) { emit(LogLevel::warning, message); }

}  // namespace fewshot
