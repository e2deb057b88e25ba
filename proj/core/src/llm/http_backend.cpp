#include <cstdlib>
#include <string>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "fewshot/error.hpp"
#include "fewshot/llm/chat.hpp"
#include "fewshot/log.hpp"

namespace fewshot::llm {
namespace {

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // prefix without trailing slash
};

ParsedUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("base_url needs a scheme: " + url);
  const auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw ConfigError("unsupported URL scheme: " + scheme);
  const auto path_start = url.find('/', scheme_end + 3);
  ParsedUrl out;
  out.origin = url.substr(0, path_start);
  out.path = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
  return out;
}

}  // namespace

struct HttpChatBackend::Impl {
  ParsedUrl url;
  std::string api_key;
  double timeout_seconds = 0;
};

HttpChatBackend::HttpChatBackend(const EndpointConfig& config) : impl_(std::make_unique<Impl>()) {
  impl_->url = split_url(config.base_url);
  impl_->timeout_seconds = config.timeout_seconds;
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (impl_->url.origin.starts_with("https")) {
    throw ConfigError("this build has no TLS support; use an http:// endpoint");
  }
#endif
  if (!config.api_key_env.empty()) {
    if (const char* key = std::getenv(config.api_key_env.c_str()); key != nullptr && *key != '\0') {
      impl_->api_key = key;
    } else {
      log_warning("environment variable " + config.api_key_env +
                  " is not set; sending requests without an API key");
    }
  }
}

HttpChatBackend::~HttpChatBackend() = default;

std::string HttpChatBackend::complete(const ChatRequest& request) {
  httplib::Client client(impl_->url.origin);
  const auto seconds = static_cast<time_t>(impl_->timeout_seconds);
  const auto micros = static_cast<time_t>((impl_->timeout_seconds - static_cast<double>(seconds)) * 1e6);
  client.set_connection_timeout(seconds, micros);
  client.set_read_timeout(seconds, micros);
  client.set_write_timeout(seconds, micros);

  httplib::Headers headers;
  if (!impl_->api_key.empty()) headers.emplace("Authorization", "Bearer " + impl_->api_key);

  const auto result = client.Post(impl_->url.path + "/v1/chat/completions", headers,
                                  request_body(request).dump(), "application/json");
  if (!result) {
    throw TransportError("HTTP request to " + impl_->url.origin + " failed: " +
                         httplib::to_string(result.error()));
  }
  const int status = result->status;
  if (status >= 500 || status == 429 || status == 408) {
    throw TransportError("HTTP " + std::to_string(status) + " from " + impl_->url.origin);
  }
  if (status >= 400) {
    throw ConfigError("HTTP " + std::to_string(status) + " from " + impl_->url.origin + ": " +
                      result->body.substr(0, 200));
  }
  return response_content(result->body);
}

}  // namespace fewshot::llm
