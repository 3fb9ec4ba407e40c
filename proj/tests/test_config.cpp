#include <doctest.h>

#include <cstdlib>
#include <fstream>

#include "freact/errors.hpp"
#include "freact/run_config.hpp"
#include "support/test_util.hpp"

using namespace freact;
using namespace freact::testing;

TEST_CASE("config files override defaults and round-trip to JSON") {
  TempDir dir("config");
  {
    std::ofstream out(dir.file("cfg.json"));
    out << R"({
      "backend": "scripted",
      "script": "s.json",
      "max_rounds": 3,
      "stop_sequences": ["\nObservation", "<eot>"],
      "reiteration_template": "[again: {question}]"
    })";
  }
  RunConfig config = RunConfig::load_file(dir.file("cfg.json"));
  CHECK(config.backend == "scripted");
  CHECK(config.script == "s.json");
  CHECK(config.max_rounds == 3);
  CHECK(config.stop_sequences.size() == 2);
  CHECK(config.malformed_budget == 2);  // untouched default

  nlohmann::json snapshot = config.to_json();
  CHECK(snapshot.at("reiteration_template") == "[again: {question}]");
  RunConfig reparsed = RunConfig::from_json(snapshot);
  CHECK(reparsed.max_rounds == 3);
  CHECK(reparsed.stop_sequences == config.stop_sequences);

  {
    std::ofstream out(dir.file("broken.json"));
    out << "{nope";
  }
  CHECK_THROWS_AS(RunConfig::load_file(dir.file("broken.json")), ConfigError);
  CHECK_THROWS_AS(RunConfig::load_file(dir.file("absent.json")), ConfigError);
}

TEST_CASE("environment variables override the file layer") {
  RunConfig config;
  config.endpoint = "http://from-file:1";
  setenv("FREACT_ENDPOINT", "http://from-env:2", 1);
  setenv("FREACT_MODEL", "env-model", 1);
  config.apply_env();
  unsetenv("FREACT_ENDPOINT");
  unsetenv("FREACT_MODEL");
  CHECK(config.endpoint == "http://from-env:2");
  CHECK(config.model == "env-model");

  // Unset variables leave values alone.
  RunConfig untouched;
  untouched.endpoint = "http://keep:3";
  untouched.apply_env();
  CHECK(untouched.endpoint == "http://keep:3");
}

TEST_CASE("factories validate their inputs") {
  RunConfig scripted;
  scripted.backend = "scripted";
  CHECK_THROWS_AS(make_backend(scripted), ConfigError);  // no script file

  RunConfig unknown;
  unknown.backend = "carrier-pigeon";
  CHECK_THROWS_AS(make_backend(unknown), ConfigError);

  RunConfig bad_shape;
  bad_shape.api_shape = "telnet";
  CHECK_THROWS_AS(make_backend(bad_shape), ConfigError);

  RunConfig fixture_tools;
  fixture_tools.tools = "fixture";
  CHECK_THROWS_AS(ToolContext{fixture_tools}, ConfigError);  // no fixture file

  RunConfig unknown_tools;
  unknown_tools.tools = "abacus";
  CHECK_THROWS_AS(ToolContext{unknown_tools}, ConfigError);

  RunConfig bad_plan;
  bad_plan.reiteration_template = "no placeholder";
  CHECK_THROWS_AS(make_plan(bad_plan, Mode::kFocused), TemplateError);
}

TEST_CASE("fewshot files load and validate") {
  RunConfig config;
  FewShotSet builtin = load_fewshot(config);
  CHECK(!builtin.examples.empty());

  TempDir dir("fewshot");
  {
    std::ofstream out(dir.file("few.json"));
    nlohmann::json value = {
        {"preamble", "Use Search, Lookup, Finish."},
        {"examples",
         {"Question: q?\nThought 1: think.\nAction 1: Search[q]\n"
          "Observation 1: o.\nThought 2: done.\nAction 2: Finish[a]"}}};
    out << value.dump();
  }
  config.fewshot_path = dir.file("few.json").string();
  FewShotSet loaded = load_fewshot(config);
  CHECK(loaded.preamble == "Use Search, Lookup, Finish.");
  CHECK(loaded.examples.size() == 1);

  {
    std::ofstream out(dir.file("bad.json"));
    nlohmann::json value = {{"preamble", "p"},
                            {"examples", {"Question: q?\nThought 1: t.\nAction 1: Fetch[x]"}}};
    out << value.dump();
  }
  config.fewshot_path = dir.file("bad.json").string();
  CHECK_THROWS_AS(load_fewshot(config), TemplateError);
}
