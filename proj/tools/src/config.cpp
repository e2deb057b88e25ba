#include "fewshot_cli/config.hpp"

#include "fewshot/error.hpp"
#include "fewshot/io.hpp"

namespace fewshot::cli {
namespace {

namespace fs = std::filesystem;

MetricId default_metric(TaskKind kind) {
  switch (kind) {
    case TaskKind::classification:
      return MetricId::exact_match;
    case TaskKind::generation:
      return MetricId::rouge_avg;
    case TaskKind::math:
      return MetricId::final_number;
  }
  return MetricId::exact_match;
}

fs::path resolve(const fs::path& base_dir, const std::string& value) {
  fs::path p(value);
  if (p.is_relative()) p = base_dir / p;
  return p.lexically_normal();
}

llm::RoleParams role_params_from_json(const nlohmann::json& json, llm::RoleParams params) {
  if (json.is_null()) return params;
  params.temperature = json.value("temperature", params.temperature);
  params.max_tokens = json.value("max_tokens", params.max_tokens);
  return params;
}

}  // namespace

TaskSpec task_from_json(const nlohmann::json& json) {
  if (!json.is_object()) throw ConfigError("\"task\" must be an object");
  TaskSpec task;
  task.kind = parse_task_kind(json.value("kind", std::string("classification")));
  task.instruction = json.value("instruction", std::string{});
  task.label_set = json.value("labels", std::vector<std::string>{});
  task.metric = json.contains("metric") ? parse_metric_id(json.at("metric").get<std::string>())
                                        : default_metric(task.kind);
  task.format = PromptFormat::defaults(task.kind);
  task.format.input_field = json.value("input_field", task.format.input_field);
  task.format.target_field = json.value("target_field", task.format.target_field);
  task.format.example_block = json.value("example_block", task.format.example_block);
  task.format.query_block = json.value("query_block", task.format.query_block);
  task.description = json.value("description", std::string{});
  task.proposer_template = json.value("proposer_template", std::string{});
  task.improver_template = json.value("improver_template", std::string{});
  if (task.kind == TaskKind::classification && task.metric != MetricId::exact_match) {
    throw ConfigError("classification tasks are scored with exact_match");
  }
  try {
    task.validate();
  } catch (const InvariantError& e) {
    throw ConfigError(e.what());
  }
  return task;
}

nlohmann::json to_json(const TaskSpec& task) {
  return {{"kind", task_kind_name(task.kind)},
          {"instruction", task.instruction},
          {"labels", task.label_set},
          {"metric", metric_name(task.metric)},
          {"input_field", task.format.input_field},
          {"target_field", task.format.target_field},
          {"example_block", task.format.example_block},
          {"query_block", task.format.query_block},
          {"description", task.description},
          {"proposer_template", task.proposer_template},
          {"improver_template", task.improver_template}};
}

llm::EndpointConfig endpoint_from_json(const nlohmann::json& json) {
  llm::EndpointConfig e;
  if (json.is_null()) return e;
  if (!json.is_object()) throw ConfigError("endpoint must be an object");
  e.base_url = json.value("base_url", e.base_url);
  e.model_name = json.value("model", e.model_name);
  e.api_key_env = json.value("api_key_env", e.api_key_env);
  e.proposer = role_params_from_json(json.value("proposer", nlohmann::json()), e.proposer);
  e.improver = role_params_from_json(json.value("improver", nlohmann::json()), e.improver);
  e.evaluator = role_params_from_json(json.value("evaluator", nlohmann::json()), e.evaluator);
  e.timeout_seconds = json.value("timeout_seconds", e.timeout_seconds);
  e.retries = json.value("retries", e.retries);
  e.backoff_seconds = json.value("backoff_seconds", e.backoff_seconds);
  e.max_concurrency = json.value("max_concurrency", e.max_concurrency);
  e.validate();
  return e;
}

nlohmann::json to_json(const llm::EndpointConfig& e) {
  const auto role = [](const llm::RoleParams& p) {
    return nlohmann::json{{"temperature", p.temperature}, {"max_tokens", p.max_tokens}};
  };
  return {{"base_url", e.base_url},
          {"model", e.model_name},
          {"api_key_env", e.api_key_env},
          {"proposer", role(e.proposer)},
          {"improver", role(e.improver)},
          {"evaluator", role(e.evaluator)},
          {"timeout_seconds", e.timeout_seconds},
          {"retries", e.retries},
          {"backoff_seconds", e.backoff_seconds},
          {"max_concurrency", e.max_concurrency}};
}

RunConfig parse_run_config(const nlohmann::json& json, const fs::path& base_dir) {
  if (!json.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig config;
  try {
    config.task = task_from_json(json.value("task", nlohmann::json::object()));
    config.optimizer = optimizer_config_from_json(json.value("optimizer", nlohmann::json::object()));

    const auto shared = json.value("endpoint", nlohmann::json::object());
    const auto per_role = json.value("endpoints", nlohmann::json::object());
    const auto for_role = [&](const char* role) {
      auto merged = shared;
      if (per_role.contains(role)) merged.merge_patch(per_role.at(role));
      return endpoint_from_json(merged);
    };
    config.proposer_endpoint = for_role("proposer");
    config.improver_endpoint = for_role("improver");
    config.evaluator_endpoint = for_role("evaluator");

    const auto data = json.value("data", nlohmann::json::object());
    if (!data.contains("train")) throw ConfigError("config needs data.train");
    config.train_path = resolve(base_dir, data.at("train").get<std::string>());
    if (data.contains("test") && !data.at("test").is_null()) {
      config.test_path = resolve(base_dir, data.at("test").get<std::string>());
    }
    config.output_dir = resolve(base_dir, json.value("output_dir", std::string("fewshot-run")));
    config.cache_key_mode = parse_key_mode(json.value("cache_key_mode", std::string("ordered")));
    config.mock = json.value("mock", false);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }

  if (!fs::is_regular_file(config.train_path)) {
    throw ConfigError("training data not found: " + config.train_path.string());
  }
  if (config.test_path && !fs::is_regular_file(*config.test_path)) {
    throw ConfigError("test data not found: " + config.test_path->string());
  }
  return config;
}

RunConfig load_run_config(const fs::path& path) {
  const auto text = read_file(path);
  const auto json = nlohmann::json::parse(text, nullptr, false);
  if (json.is_discarded()) throw ConfigError(path.string() + " is not valid JSON");
  return parse_run_config(json, fs::absolute(path).parent_path());
}

void apply_overrides(RunConfig& config, const Overrides& overrides) {
  if (overrides.seed) config.optimizer.seed = *overrides.seed;
  if (overrides.output_dir) config.output_dir = fs::absolute(*overrides.output_dir).lexically_normal();
  if (overrides.workers) config.optimizer.workers = *overrides.workers;
  if (overrides.mock) config.mock = true;
  config.optimizer.validate();
}

nlohmann::json to_json(const RunConfig& config) {
  nlohmann::json data = {{"train", fs::absolute(config.train_path).string()}};
  if (config.test_path) data["test"] = fs::absolute(*config.test_path).string();
  return {{"task", to_json(config.task)},
          {"optimizer", to_json(config.optimizer)},
          {"endpoint", nlohmann::json::object()},
          {"endpoints",
           {{"proposer", to_json(config.proposer_endpoint)},
            {"improver", to_json(config.improver_endpoint)},
            {"evaluator", to_json(config.evaluator_endpoint)}}},
          {"data", std::move(data)},
          {"output_dir", fs::absolute(config.output_dir).string()},
          {"cache_key_mode", key_mode_name(config.cache_key_mode)},
          {"mock", config.mock}};
}

}  // namespace fewshot::cli
