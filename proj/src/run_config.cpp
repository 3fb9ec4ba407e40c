#include "freact/run_config.hpp"

#include <cstdlib>
#include <fstream>

#include "freact/errors.hpp"
#include "freact/wiki_api.hpp"

namespace freact {

namespace {

using nlohmann::json;

template <typename T>
void read_into(const json& value, const char* key, T& target) {
  if (value.contains(key)) target = value.at(key).get<T>();
}

}  // namespace

RunConfig RunConfig::from_json(const nlohmann::json& value) {
  RunConfig config;
  read_into(value, "backend", config.backend);
  read_into(value, "endpoint", config.endpoint);
  read_into(value, "model", config.model);
  read_into(value, "api_shape", config.api_shape);
  read_into(value, "api_key_env", config.api_key_env);
  read_into(value, "http_timeout_seconds", config.http_timeout_seconds);
  read_into(value, "http_max_retries", config.http_max_retries);
  read_into(value, "script", config.script);
  read_into(value, "scripted_latency_seconds", config.scripted_latency_seconds);
  read_into(value, "tools", config.tools);
  read_into(value, "wiki_api_url", config.wiki_api_url);
  read_into(value, "fixture", config.fixture);
  read_into(value, "cache_enabled", config.cache_enabled);
  read_into(value, "summary_sentences", config.summary_sentences);
  read_into(value, "max_rounds", config.max_rounds);
  read_into(value, "malformed_budget", config.malformed_budget);
  read_into(value, "reiteration_template", config.reiteration_template);
  read_into(value, "forced_answer_template", config.forced_answer_template);
  read_into(value, "stop_sequences", config.stop_sequences);
  read_into(value, "max_new_tokens", config.max_new_tokens);
  read_into(value, "fewshot_path", config.fewshot_path);
  read_into(value, "concurrency", config.concurrency);
  read_into(value, "slim_traces", config.slim_traces);
  return config;
}

RunConfig RunConfig::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  try {
    return from_json(json::parse(in));
  } catch (const json::exception& ex) {
    throw ConfigError("config file " + path.string() + ": " + ex.what());
  }
}

void RunConfig::apply_env() {
  auto from_env = [](const char* name, std::string& target) {
    if (const char* value = std::getenv(name); value && *value) target = value;
  };
  from_env("FREACT_ENDPOINT", endpoint);
  from_env("FREACT_MODEL", model);
  from_env("FREACT_BACKEND", backend);
  from_env("FREACT_API_SHAPE", api_shape);
}

nlohmann::json RunConfig::to_json() const {
  return {{"backend", backend},
          {"endpoint", endpoint},
          {"model", model},
          {"api_shape", api_shape},
          {"api_key_env", api_key_env},
          {"http_timeout_seconds", http_timeout_seconds},
          {"http_max_retries", http_max_retries},
          {"script", script},
          {"scripted_latency_seconds", scripted_latency_seconds},
          {"tools", tools},
          {"wiki_api_url", wiki_api_url},
          {"fixture", fixture},
          {"cache_enabled", cache_enabled},
          {"summary_sentences", summary_sentences},
          {"max_rounds", max_rounds},
          {"malformed_budget", malformed_budget},
          {"reiteration_template", reiteration_template},
          {"forced_answer_template", forced_answer_template},
          {"stop_sequences", stop_sequences},
          {"max_new_tokens", max_new_tokens},
          {"fewshot_path", fewshot_path},
          {"concurrency", concurrency},
          {"slim_traces", slim_traces}};
}

std::unique_ptr<LlmBackend> make_backend(const RunConfig& config) {
  if (config.backend == "scripted") {
    if (config.script.empty()) {
      throw ConfigError("scripted backend needs a script file (script / --script)");
    }
    return std::make_unique<ScriptedBackend>(load_script(config.script),
                                             config.scripted_latency_seconds);
  }
  if (config.backend != "http") {
    throw ConfigError("unknown backend: " + config.backend);
  }
  HttpBackendConfig http;
  http.endpoint = config.endpoint;
  http.model = config.model;
  if (config.api_shape == "chat") {
    http.shape = HttpBackendConfig::Shape::kChat;
  } else if (config.api_shape == "completions") {
    http.shape = HttpBackendConfig::Shape::kCompletions;
  } else {
    throw ConfigError("unknown api_shape: " + config.api_shape);
  }
  http.api_key_env = config.api_key_env;
  http.timeout_seconds = config.http_timeout_seconds;
  http.max_retries = config.http_max_retries;
  return std::make_unique<HttpBackend>(std::move(http));
}

PromptPlan make_plan(const RunConfig& config, Mode mode) {
  PromptPlan plan;
  plan.mode = mode;
  plan.reiteration_template = config.reiteration_template;
  plan.forced_answer_template = config.forced_answer_template;
  plan.stop_sequences = config.stop_sequences;
  plan.max_new_tokens = config.max_new_tokens;
  validate_plan(plan);
  return plan;
}

EngineConfig make_engine_config(const RunConfig& config, Mode mode) {
  EngineConfig engine;
  engine.max_rounds = config.max_rounds;
  engine.malformed_budget = config.malformed_budget;
  engine.mode = mode;
  return engine;
}

FewShotSet load_fewshot(const RunConfig& config) {
  if (config.fewshot_path.empty()) return default_fewshot();
  std::ifstream in(config.fewshot_path);
  if (!in) throw ConfigError("cannot open fewshot file: " + config.fewshot_path);
  FewShotSet fewshot;
  try {
    nlohmann::json value = nlohmann::json::parse(in);
    fewshot.preamble = value.at("preamble").get<std::string>();
    fewshot.examples = value.at("examples").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError("fewshot file " + config.fewshot_path + ": " + ex.what());
  }
  validate_fewshot(fewshot);
  return fewshot;
}

ToolContext::ToolContext(const RunConfig& config) {
  if (config.tools == "fixture") {
    if (config.fixture.empty()) {
      throw ConfigError("fixture tools need a fixture file (fixture / --fixture)");
    }
    toolset_ = std::make_unique<FixtureToolset>(FixtureToolset::load(config.fixture));
    return;
  }
  if (config.tools != "wiki") {
    throw ConfigError("unknown tools: " + config.tools);
  }
  MediaWikiConfig wiki;
  wiki.api_url = config.wiki_api_url;
  source_ = std::make_unique<MediaWikiSource>(wiki);
  if (config.cache_enabled) cache_ = std::make_unique<PageCache>();
  WikiToolsetOptions options;
  options.summary_sentences = config.summary_sentences;
  toolset_ = std::make_unique<WikiToolset>(*source_, options, cache_.get());
}

}  // namespace freact
