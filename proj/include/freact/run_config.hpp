#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "freact/backend.hpp"
#include "freact/engine.hpp"
#include "freact/prompting.hpp"
#include "freact/tools.hpp"

namespace freact {

// Every knob for a run, collected in one artifact so a report can embed the
// exact configuration it was produced under. Sources are merged with
// precedence flags > environment > file > defaults; the CLI applies flag
// overrides after load()/apply_env().
struct RunConfig {
  // backend
  std::string backend = "http";  // "http" | "scripted"
  std::string endpoint = "http://localhost:8000";
  std::string model = "local-model";
  std::string api_shape = "chat";  // "chat" | "completions"
  std::string api_key_env = "FREACT_API_KEY";
  double http_timeout_seconds = 120.0;
  int http_max_retries = 2;
  std::string script;  // scripted backend file; reloaded per episode
  double scripted_latency_seconds = 0.0;

  // tools
  std::string tools = "wiki";  // "wiki" | "fixture"
  std::string wiki_api_url = "https://en.wikipedia.org/w/api.php";
  std::string fixture;  // replay file for tools = "fixture"
  bool cache_enabled = true;
  int summary_sentences = 5;

  // engine
  int max_rounds = 8;
  int malformed_budget = 2;

  // prompting
  std::string reiteration_template = "(Original question: {question})";
  std::string forced_answer_template =
      "You have gathered enough information. Based on the observations above, "
      "answer the original question: {question}\nAnswer:";
  std::vector<std::string> stop_sequences = {"\nObservation"};
  int max_new_tokens = 256;
  std::string fewshot_path;  // optional {preamble, examples[]} JSON file

  // harness
  int concurrency = 1;
  bool slim_traces = false;

  static RunConfig from_json(const nlohmann::json& value);
  static RunConfig load_file(const std::filesystem::path& path);

  // FREACT_ENDPOINT / FREACT_MODEL / FREACT_BACKEND / FREACT_API_SHAPE.
  void apply_env();

  nlohmann::json to_json() const;
};

// Fresh backend per episode: scripted backends are single-consumer, and the
// HTTP backend is cheap to construct.
std::unique_ptr<LlmBackend> make_backend(const RunConfig& config);

PromptPlan make_plan(const RunConfig& config, Mode mode);
EngineConfig make_engine_config(const RunConfig& config, Mode mode);

// Built-in scaffold, or the file named by fewshot_path (validated on load).
FewShotSet load_fewshot(const RunConfig& config);

// Owns the knowledge source, optional shared page cache, and the toolset
// picked by the config. One instance serves all concurrent episodes.
class ToolContext {
 public:
  explicit ToolContext(const RunConfig& config);

  Toolset& toolset() { return *toolset_; }
  PageCache* cache() { return cache_.get(); }

 private:
  std::unique_ptr<KnowledgeSource> source_;
  std::unique_ptr<PageCache> cache_;
  std::unique_ptr<Toolset> toolset_;
};

}  // namespace freact
