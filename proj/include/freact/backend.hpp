#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace freact {

struct CompletionRequest {
  std::string prompt;
  std::vector<std::string> stop;
  int max_new_tokens = 256;
  double temperature = 0.0;  // greedy by default
};

struct TokenCounts {
  long prompt = 0;
  long completion = 0;
};

struct CompletionResponse {
  std::string text;  // stop sequence already removed
  double latency_seconds = 0.0;
  std::optional<TokenCounts> token_counts;  // absent for scripted backends
};

// Blocking completion interface. Implementations must tolerate concurrent
// callers or serialize internally; the engine treats the call as opaque.
class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  virtual CompletionResponse complete(const CompletionRequest& request) = 0;
};

// Truncates text at the earliest occurrence of any stop sequence.
std::string strip_at_stop(const std::string& text, const std::vector<std::string>& stop);

// ---------------------------------------------------------------------------
// Scripted backend: replays canned generations, one episode per instance.

struct ScriptEntry {
  std::string response;
  // When set, complete() throws ScriptMismatch unless the incoming prompt
  // contains this substring. This is how reiteration presence gets
  // integration-tested.
  std::optional<std::string> expected_prompt_substring;
};

class ScriptedBackend : public LlmBackend {
 public:
  explicit ScriptedBackend(std::vector<ScriptEntry> entries, double latency_seconds = 0.0);

  CompletionResponse complete(const CompletionRequest& request) override;

  int calls_made() const { return static_cast<int>(next_); }
  const std::vector<std::string>& prompts_seen() const { return prompts_seen_; }

 private:
  std::vector<ScriptEntry> entries_;
  std::vector<std::string> prompts_seen_;
  size_t next_ = 0;
  double latency_seconds_;
};

// Loads a script file: either a JSON array of entries or one JSON object per
// line. Each entry is {"response": "...", "expected_prompt_substring": "..."}
// (the substring is optional; a bare string is shorthand for response-only).
// Throws FixtureFormatError on parse failure.
std::vector<ScriptEntry> load_script(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// HTTP backend: OpenAI-compatible completions / chat-completions endpoints.

struct HttpBackendConfig {
  std::string endpoint;  // scheme://host[:port][/prefix]
  std::string model;
  enum class Shape { kCompletions, kChat };
  Shape shape = Shape::kChat;
  // Name of the environment variable holding the bearer token. Empty value or
  // unset variable sends no Authorization header.
  std::string api_key_env = "FREACT_API_KEY";
  double timeout_seconds = 120.0;
  int max_retries = 2;
  double retry_backoff_seconds = 0.5;  // doubled per retry
};

class HttpBackend : public LlmBackend {
 public:
  explicit HttpBackend(HttpBackendConfig config);

  // Throws BackendError after the retry budget is spent on transport errors
  // or retryable HTTP statuses (429/5xx); non-retryable statuses fail fast.
  CompletionResponse complete(const CompletionRequest& request) override;

 private:
  HttpBackendConfig config_;
  std::string origin_;       // scheme://host[:port]
  std::string path_prefix_;  // leading path from the endpoint, may be empty
};

}  // namespace freact
