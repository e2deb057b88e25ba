#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "fewshot/llm/chat.hpp"
#include "fewshot/optimizer.hpp"
#include "fewshot/types.hpp"
#include "fewshot/utility_cache.hpp"

namespace fewshot::cli {

// Everything a run needs, read from one JSON document.
struct RunConfig {
  TaskSpec task;
  OptimizerConfig optimizer;
  llm::EndpointConfig proposer_endpoint;
  llm::EndpointConfig improver_endpoint;
  llm::EndpointConfig evaluator_endpoint;
  std::filesystem::path train_path;
  std::optional<std::filesystem::path> test_path;
  std::filesystem::path output_dir;
  KeyMode cache_key_mode = KeyMode::ordered;
  bool mock = false;
};

// Command-line values that replace config keys.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::size_t> workers;
  bool mock = false;
};

// Relative paths are resolved against base_dir. Throws ConfigError.
RunConfig parse_run_config(const nlohmann::json& json, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);
void apply_overrides(RunConfig& config, const Overrides& overrides);

// Fully resolved configuration (absolute paths, effective seed); parsing it
// again yields the same config.
nlohmann::json to_json(const RunConfig& config);

TaskSpec task_from_json(const nlohmann::json& json);
nlohmann::json to_json(const TaskSpec& task);
llm::EndpointConfig endpoint_from_json(const nlohmann::json& json);
nlohmann::json to_json(const llm::EndpointConfig& endpoint);

}  // namespace fewshot::cli
