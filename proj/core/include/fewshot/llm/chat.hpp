#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <semaphore>
#include <string>
#include <string_view>

#include <nlohmann/json_fwd.hpp>

namespace fewshot::llm {

enum class Role { proposer, improver, evaluator };

std::string_view role_name(Role role);

struct RoleParams {
  double temperature = 0.0;
  int max_tokens = 256;
};

// One OpenAI-compatible endpoint. The sampling defaults give the generation
// roles diversity and keep the evaluator greedy.
struct EndpointConfig {
  std::string base_url = "http://127.0.0.1:8000";
  std::string model_name;
  std::string api_key_env;  // variable holding the bearer token; empty = none
  RoleParams proposer{0.7, 2048};
  RoleParams improver{0.7, 2048};
  RoleParams evaluator{0.0, 64};
  double timeout_seconds = 120.0;
  int retries = 3;  // extra attempts after the first
  double backoff_seconds = 1.0;  // doubled after each failed attempt
  std::size_t max_concurrency = 8;

  const RoleParams& params(Role role) const;
  // Throws ConfigError.
  void validate() const;
};

struct ChatRequest {
  std::string model;
  std::string prompt;
  double temperature = 0.0;
  int max_tokens = 256;
};

// {model, messages:[{role:"user", content}], temperature, max_tokens}
nlohmann::json request_body(const ChatRequest& request);
// choices[0].message.content; TransportError when the body is malformed.
std::string response_content(std::string_view body);

// Sends one request. Throws TransportError for retryable failures (network,
// timeout, 5xx, 429) and ConfigError for the rest of 4xx.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual std::string complete(const ChatRequest& request) = 0;
};

// POST {base_url}/v1/chat/completions over HTTP(S).
class HttpChatBackend final : public ChatBackend {
 public:
  // The bearer token is read from config.api_key_env at construction.
  explicit HttpChatBackend(const EndpointConfig& config);
  ~HttpChatBackend() override;

  std::string complete(const ChatRequest& request) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Role-aware client with retries, exponential backoff and a bound on
// in-flight requests. Shareable across threads.
class ChatClient {
 public:
  struct Stats {
    std::uint64_t requests = 0;  // attempts sent to the backend
    std::uint64_t retries = 0;
    std::uint64_t failures = 0;  // calls that ended in an exception
    std::uint64_t max_in_flight = 0;
  };

  using Sleeper = std::function<void(std::chrono::duration<double>)>;

  ChatClient(EndpointConfig config, std::shared_ptr<ChatBackend> backend,
             Sleeper sleeper = {});

  // One single-message chat completion for the role; returns the assistant
  // text verbatim.
  std::string predict(const std::string& prompt, Role role);

  const EndpointConfig& config() const { return config_; }
  Stats stats() const;

 private:
  static constexpr std::ptrdiff_t kMaxSlots = 1024;

  EndpointConfig config_;
  std::shared_ptr<ChatBackend> backend_;
  Sleeper sleeper_;
  std::counting_semaphore<kMaxSlots> slots_;
  std::atomic<std::uint64_t> in_flight_{0};
  std::atomic<std::uint64_t> max_in_flight_{0};
  std::atomic<std::uint64_t> requests_{0};
  std::atomic<std::uint64_t> retries_{0};
  std::atomic<std::uint64_t> failures_{0};
};

}  // namespace fewshot::llm
