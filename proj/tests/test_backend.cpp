#include <doctest.h>

#include <atomic>
#include <fstream>
#include <random>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "freact/backend.hpp"
#include "freact/errors.hpp"
#include "support/test_util.hpp"

using namespace freact;
using namespace freact::testing;

TEST_CASE("scripted backend pops responses in order") {
  ScriptedBackend backend({entry("A"), entry("B")});
  CompletionRequest request;
  request.prompt = "p";
  CHECK(backend.complete(request).text == "A");
  CHECK(backend.complete(request).text == "B");
  CHECK(backend.calls_made() == 2);
  CHECK_THROWS_AS(backend.complete(request), ScriptExhausted);
}

TEST_CASE("scripted backend asserts expected prompt substrings") {
  ScriptedBackend backend({ScriptEntry{"ok", "(Original question:"}});
  CompletionRequest vanilla;
  vanilla.prompt = "Question: q\nThought 1:";
  CHECK_THROWS_AS(backend.complete(vanilla), ScriptMismatch);

  ScriptedBackend happy({ScriptEntry{"ok", "(Original question:"}});
  CompletionRequest focused;
  focused.prompt = "Question: q\n(Original question: q)\nThought 1:";
  CHECK(happy.complete(focused).text == "ok");
}

TEST_CASE("stop sequences are stripped from every response") {
  ScriptedBackend backend({entry("foo\nObservation 1: leaked")});
  CompletionRequest request;
  request.stop = {"\nObservation"};
  CHECK(backend.complete(request).text == "foo");

  // Property: no response ever contains a configured stop sequence.
  std::mt19937 rng(11);
  const std::vector<std::string> stops = {"\nObservation", "<|eot|>"};
  for (int i = 0; i < 200; ++i) {
    std::string text;
    for (int piece = 0; piece < 4; ++piece) {
      text += "chunk" + std::to_string(rng() % 10);
      if (rng() % 2) text += stops[rng() % stops.size()];
    }
    ScriptedBackend adversarial({entry(text)});
    CompletionRequest req;
    req.stop = stops;
    std::string out = adversarial.complete(req).text;
    for (const std::string& stop : stops) {
      CHECK(out.find(stop) == std::string::npos);
    }
  }
}

TEST_CASE("load_script accepts a JSON array or JSONL") {
  TempDir dir("script");

  {
    std::ofstream out(dir.file("array.json"));
    out << R"(["plain", {"response": "r2", "expected_prompt_substring": "marker"}])";
  }
  auto array_entries = load_script(dir.file("array.json"));
  REQUIRE(array_entries.size() == 2);
  CHECK(array_entries[0].response == "plain");
  CHECK(array_entries[1].expected_prompt_substring == "marker");

  {
    std::ofstream out(dir.file("lines.jsonl"));
    out << R"({"response": "one"})" << "\n\n" << R"({"response": "two"})" << "\n";
  }
  auto line_entries = load_script(dir.file("lines.jsonl"));
  REQUIRE(line_entries.size() == 2);
  CHECK(line_entries[1].response == "two");

  {
    std::ofstream out(dir.file("broken.json"));
    out << "{not json";
  }
  CHECK_THROWS_AS(load_script(dir.file("broken.json")), FixtureFormatError);
  CHECK_THROWS_AS(load_script(dir.file("missing.json")), FixtureFormatError);

  // An empty script loads fine and fails on first use.
  {
    std::ofstream out(dir.file("empty.json"));
    out << "[]";
  }
  ScriptedBackend backend(load_script(dir.file("empty.json")));
  CompletionRequest request;
  CHECK_THROWS_AS(backend.complete(request), ScriptExhausted);
}

namespace {

// In-process OpenAI-shaped server for backend tests.
class LocalServer {
 public:
  LocalServer() {
    server_.Post("/v1/completions", [this](const httplib::Request& req, httplib::Response& res) {
      handle(req, res, false);
    });
    server_.Post("/v1/chat/completions",
                 [this](const httplib::Request& req, httplib::Response& res) {
                   handle(req, res, true);
                 });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~LocalServer() {
    server_.stop();
    thread_.join();
  }

  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_); }

  std::atomic<int> fail_next{0};      // respond 500 to this many requests
  std::atomic<int> requests_seen{0};
  std::string canned_text = "Thought 1: hi\nAction 1: Finish[ok]";
  std::string last_auth;
  nlohmann::json last_body;

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;

  void handle(const httplib::Request& req, httplib::Response& res, bool chat) {
    ++requests_seen;
    last_auth = req.get_header_value("Authorization");
    last_body = nlohmann::json::parse(req.body);
    if (fail_next.fetch_sub(1) > 0) {
      res.status = 500;
      res.set_content("{\"error\": \"boom\"}", "application/json");
      return;
    }
    fail_next = 0;
    nlohmann::json choice;
    if (chat) {
      choice = {{"message", {{"role", "assistant"}, {"content", canned_text}}}, {"index", 0}};
    } else {
      choice = {{"text", canned_text}, {"index", 0}};
    }
    nlohmann::json body = {
        {"choices", nlohmann::json::array({choice})},
        {"usage", {{"prompt_tokens", 12}, {"completion_tokens", 5}, {"total_tokens", 17}}}};
    res.set_content(body.dump(), "application/json");
  }
};

HttpBackendConfig local_config(const LocalServer& server, HttpBackendConfig::Shape shape) {
  HttpBackendConfig config;
  config.endpoint = server.endpoint();
  config.model = "test-model";
  config.shape = shape;
  config.retry_backoff_seconds = 0.0;
  config.timeout_seconds = 5.0;
  return config;
}

}  // namespace

TEST_CASE("http backend completes against both endpoint shapes") {
  LocalServer server;

  HttpBackend completions(local_config(server, HttpBackendConfig::Shape::kCompletions));
  CompletionRequest request;
  request.prompt = "Question: q\nThought 1:";
  request.stop = {"\nObservation"};
  request.max_new_tokens = 64;
  CompletionResponse response = completions.complete(request);
  CHECK(response.text == "Thought 1: hi\nAction 1: Finish[ok]");
  REQUIRE(response.token_counts.has_value());
  CHECK(response.token_counts->prompt == 12);
  CHECK(response.token_counts->completion == 5);
  CHECK(server.last_body.at("prompt") == request.prompt);
  CHECK(server.last_body.at("max_tokens") == 64);

  HttpBackend chat(local_config(server, HttpBackendConfig::Shape::kChat));
  CompletionResponse chat_response = chat.complete(request);
  CHECK(chat_response.text == "Thought 1: hi\nAction 1: Finish[ok]");
  CHECK(server.last_body.at("messages").at(0).at("content") == request.prompt);
}

TEST_CASE("http backend strips echoed stop sequences") {
  LocalServer server;
  server.canned_text = "a thought\nObservation 1: echoed by a sloppy server";
  HttpBackend backend(local_config(server, HttpBackendConfig::Shape::kChat));
  CompletionRequest request;
  request.stop = {"\nObservation"};
  CHECK(backend.complete(request).text == "a thought");
}

TEST_CASE("http backend sends the bearer token from the environment") {
  LocalServer server;
  setenv("FREACT_TEST_KEY", "sk-secret", 1);
  HttpBackendConfig config = local_config(server, HttpBackendConfig::Shape::kChat);
  config.api_key_env = "FREACT_TEST_KEY";
  HttpBackend backend(config);
  backend.complete(CompletionRequest{});
  CHECK(server.last_auth == "Bearer sk-secret");
  unsetenv("FREACT_TEST_KEY");
}

TEST_CASE("http backend retries transient failures") {
  LocalServer server;
  server.fail_next = 2;  // two 500s, then success
  HttpBackend backend(local_config(server, HttpBackendConfig::Shape::kChat));
  CompletionResponse response = backend.complete(CompletionRequest{});
  CHECK(response.text == "Thought 1: hi\nAction 1: Finish[ok]");
  CHECK(server.requests_seen == 3);
}

TEST_CASE("http backend fails after the retry budget") {
  LocalServer server;
  server.fail_next = 10;
  HttpBackend backend(local_config(server, HttpBackendConfig::Shape::kChat));
  try {
    backend.complete(CompletionRequest{});
    FAIL("expected BackendError");
  } catch (const BackendError& ex) {
    CHECK(ex.status == 500);
    CHECK(ex.body.find("boom") != std::string::npos);
  }
  CHECK(server.requests_seen == 3);  // initial try + 2 retries
}

TEST_CASE("http backend fails fast on non-retryable statuses") {
  LocalServer server;
  HttpBackendConfig config = local_config(server, HttpBackendConfig::Shape::kChat);
  config.endpoint = server.endpoint();  // valid server, bogus path via prefix
  HttpBackend backend(config);
  // Point at a path that does not exist by abusing the prefix.
  HttpBackendConfig bad = config;
  bad.endpoint = server.endpoint() + "/nowhere";
  HttpBackend missing(bad);
  CHECK_THROWS_AS(missing.complete(CompletionRequest{}), BackendError);
  CHECK(server.requests_seen == 0);  // 404 comes from httplib's router
}

TEST_CASE("http backend reports unreachable endpoints") {
  HttpBackendConfig config;
  config.endpoint = "http://127.0.0.1:1";  // nothing listens there
  config.model = "m";
  config.retry_backoff_seconds = 0.0;
  config.timeout_seconds = 1.0;
  HttpBackend backend(config);
  try {
    backend.complete(CompletionRequest{});
    FAIL("expected BackendError");
  } catch (const BackendError& ex) {
    CHECK(ex.status == 0);
  }
}
