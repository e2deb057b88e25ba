#include "fewshot/llm/chat.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <nlohmann/json.hpp>

#include "fewshot/error.hpp"
#include "fewshot/log.hpp"
#include "fewshot/types.hpp"

namespace fewshot::llm {

std::string_view role_name(Role role) {
  switch (role) {
    case Role::proposer:
      return "proposer";
    case Role::improver:
      return "improver";
    case Role::evaluator:
      return "evaluator";
  }
  return "evaluator";
}

const RoleParams& EndpointConfig::params(Role role) const {
  switch (role) {
    case Role::proposer:
      return proposer;
    case Role::improver:
      return improver;
    case Role::evaluator:
      return evaluator;
  }
  return evaluator;
}

void EndpointConfig::validate() const {
  if (base_url.empty()) throw ConfigError("endpoint base_url is empty");
  for (const Role role : {Role::proposer, Role::improver, Role::evaluator}) {
    const auto& p = params(role);
    if (!(p.temperature >= 0)) {
      throw ConfigError("temperature for " + std::string(role_name(role)) + " must be >= 0");
    }
    if (p.max_tokens < 1) {
      throw ConfigError("max_tokens for " + std::string(role_name(role)) + " must be >= 1");
    }
  }
  if (retries < 0) throw ConfigError("retry budget must be >= 0");
  if (max_concurrency < 1) throw ConfigError("max_concurrency must be >= 1");
  if (!(timeout_seconds > 0)) throw ConfigError("timeout must be positive");
  if (!(backoff_seconds >= 0)) throw ConfigError("backoff must be >= 0");
}

nlohmann::json request_body(const ChatRequest& request) {
  return {{"model", request.model},
          {"messages", nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}})},
          {"temperature", request.temperature},
          {"max_tokens", request.max_tokens}};
}

std::string response_content(std::string_view body) {
  const auto parsed = nlohmann::json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded()) throw TransportError("chat response is not valid JSON");
  try {
    const auto& content = parsed.at("choices").at(0).at("message").at("content");
    if (content.is_null()) return {};
    return content.get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("chat response lacks choices[0].message.content: ") + e.what());
  }
}

ChatClient::ChatClient(EndpointConfig config, std::shared_ptr<ChatBackend> backend, Sleeper sleeper)
    : config_(std::move(config)),
      backend_(std::move(backend)),
      sleeper_(std::move(sleeper)),
      slots_(static_cast<std::ptrdiff_t>(std::min<std::size_t>(
          std::max<std::size_t>(config_.max_concurrency, 1), kMaxSlots))) {
  config_.validate();
  if (!backend_) throw ConfigError("chat client needs a backend");
  if (!sleeper_) {
    sleeper_ = [](std::chrono::duration<double> d) { std::this_thread::sleep_for(d); };
  }
}

std::string ChatClient::predict(const std::string& prompt, Role role) {
  if (trim(prompt).empty()) throw InvariantError("prompt must be non-empty");
  const auto& params = config_.params(role);
  const ChatRequest request{config_.model_name, prompt, params.temperature, params.max_tokens};

  for (int attempt = 0;; ++attempt) {
    try {
      slots_.acquire();
      struct Release {
        ChatClient& self;
        ~Release() {
          self.in_flight_.fetch_sub(1);
          self.slots_.release();
        }
      } release{*this};
      const auto now = in_flight_.fetch_add(1) + 1;
      auto seen = max_in_flight_.load();
      while (now > seen && !max_in_flight_.compare_exchange_weak(seen, now)) {
      }
      requests_.fetch_add(1);
      return backend_->complete(request);
    } catch (const TransportError& e) {
      if (attempt >= config_.retries) {
        failures_.fetch_add(1);
        throw TransportError(std::string(role_name(role)) + " request failed after " +
                             std::to_string(attempt + 1) + " attempt(s): " + e.what());
      }
      retries_.fetch_add(1);
      const double delay = config_.backoff_seconds * std::pow(2.0, attempt);
      log_warning(std::string(role_name(role)) + " request failed (" + e.what() +
                  "), retrying in " + std::to_string(delay) + "s");
      sleeper_(std::chrono::duration<double>(delay));
    } catch (...) {
      failures_.fetch_add(1);
      throw;
    }
  }
}

ChatClient::Stats ChatClient::stats() const {
  return {requests_.load(), retries_.load(), failures_.load(), max_in_flight_.load()};
}

}  // namespace fewshot::llm
