#include <chrono>
#include <cmath>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "freact/backend.hpp"
#include "freact/errors.hpp"

namespace freact {

namespace {

using nlohmann::json;

constexpr size_t kBodyExcerptLimit = 240;

std::string excerpt(const std::string& body) {
  if (body.size() <= kBodyExcerptLimit) return body;
  return body.substr(0, kBodyExcerptLimit) + "...";
}

bool retryable_status(int status) { return status == 429 || status >= 500; }

struct SplitUrl {
  std::string origin;
  std::string path_prefix;
};

SplitUrl split_endpoint(const std::string& endpoint) {
  size_t scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("endpoint must include a scheme, got: " + endpoint);
  }
  size_t path_start = endpoint.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {endpoint, ""};
  std::string prefix = endpoint.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {endpoint.substr(0, path_start), prefix};
}

}  // namespace

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
  if (config_.endpoint.empty()) throw ConfigError("http backend needs an endpoint URL");
  if (config_.model.empty()) throw ConfigError("http backend needs a model name");
  SplitUrl split = split_endpoint(config_.endpoint);
  origin_ = split.origin;
  path_prefix_ = split.path_prefix;
}

CompletionResponse HttpBackend::complete(const CompletionRequest& request) {
  const bool chat = config_.shape == HttpBackendConfig::Shape::kChat;
  const std::string path =
      path_prefix_ + (chat ? "/v1/chat/completions" : "/v1/completions");

  json body;
  body["model"] = config_.model;
  body["max_tokens"] = request.max_new_tokens;
  body["temperature"] = request.temperature;
  if (!request.stop.empty()) body["stop"] = request.stop;
  if (chat) {
    body["messages"] = json::array({json{{"role", "user"}, {"content", request.prompt}}});
  } else {
    body["prompt"] = request.prompt;
  }
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (!config_.api_key_env.empty()) {
    if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }

  int last_status = 0;
  std::string last_body;
  std::string last_error;

  auto started = std::chrono::steady_clock::now();
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      double backoff = config_.retry_backoff_seconds * std::pow(2.0, attempt - 1);
      std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
    }

    httplib::Client client(origin_);
    client.set_connection_timeout(std::chrono::duration<double>(config_.timeout_seconds));
    client.set_read_timeout(std::chrono::duration<double>(config_.timeout_seconds));
    client.set_write_timeout(std::chrono::duration<double>(config_.timeout_seconds));

    httplib::Result result = client.Post(path, headers, payload, "application/json");
    if (!result) {
      last_status = 0;
      last_body.clear();
      last_error = httplib::to_string(result.error());
      continue;
    }
    last_status = result->status;
    last_body = result->body;
    if (retryable_status(result->status)) continue;
    if (result->status < 200 || result->status >= 300) {
      throw BackendError(result->status, excerpt(result->body),
                         "backend returned HTTP " + std::to_string(result->status));
    }

    double latency =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    try {
      json parsed = json::parse(result->body);
      const json& choice = parsed.at("choices").at(0);
      std::string text =
          chat ? choice.at("message").at("content").get<std::string>()
               : choice.at("text").get<std::string>();
      CompletionResponse response;
      response.text = strip_at_stop(text, request.stop);
      response.latency_seconds = latency;
      if (parsed.contains("usage") && parsed["usage"].is_object()) {
        TokenCounts counts;
        counts.prompt = parsed["usage"].value("prompt_tokens", 0L);
        counts.completion = parsed["usage"].value("completion_tokens", 0L);
        response.token_counts = counts;
      }
      return response;
    } catch (const json::exception& ex) {
      throw BackendError(result->status, excerpt(result->body),
                         std::string("unparseable completion response: ") + ex.what());
    }
  }

  std::string message = "backend unreachable after " + std::to_string(config_.max_retries + 1) +
                        " attempts";
  if (last_status != 0) {
    message += " (last status " + std::to_string(last_status) + ")";
  } else if (!last_error.empty()) {
    message += " (" + last_error + ")";
  }
  throw BackendError(last_status, excerpt(last_body), message);
}

}  // namespace freact
