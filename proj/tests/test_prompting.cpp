#include <doctest.h>

#include "freact/engine.hpp"
#include "freact/errors.hpp"
#include "freact/prompting.hpp"
#include "freact/text.hpp"
#include "support/test_util.hpp"

using namespace freact;
using namespace freact::testing;

namespace {

std::string ends_with_check(const std::string& text, const std::string& suffix) {
  REQUIRE(text.size() >= suffix.size());
  return text.substr(text.size() - suffix.size());
}

std::string remove_all(std::string text, const std::string& needle) {
  size_t pos;
  while ((pos = text.find(needle)) != std::string::npos) text.erase(pos, needle.size());
  return text;
}

// A five-round scripted episode with distinct searches; the step cap forces
// the sixth (answer) entry in Focused mode.
Episode scripted_episode(Mode mode, const std::string& question) {
  std::vector<ScriptEntry> script;
  std::vector<FixtureEntry> fixture;
  for (int r = 1; r <= 5; ++r) {
    std::string arg = "alpha" + std::to_string(r);
    script.push_back(entry(round_response(r, "step " + std::to_string(r),
                                          "Search[" + arg + "]")));
    fixture.push_back(fixture_entry(Action{ActionName::kSearch, arg},
                                    "facts about " + arg + "."));
  }
  if (mode == Mode::kFocused) script.push_back(entry("Grounded answer."));

  ScriptedBackend backend(std::move(script));
  FixtureToolset tools(std::move(fixture));
  EngineConfig config;
  config.max_rounds = 5;
  config.mode = mode;
  PromptPlan plan;
  plan.mode = mode;
  return run_episode(question, config, backend, tools, plan, default_fewshot(), "t");
}

}  // namespace

TEST_CASE("build_initial_prompt ends with the question header and first cue") {
  std::string prompt = build_initial_prompt(default_fewshot(), "Who wrote X?");
  CHECK(ends_with_check(prompt, "Question: Who wrote X?\nThought 1:") ==
        "Question: Who wrote X?\nThought 1:");

  // Deterministic: same inputs, same output.
  CHECK(prompt == build_initial_prompt(default_fewshot(), "Who wrote X?"));

  CHECK_THROWS_AS(build_initial_prompt(default_fewshot(), ""), InvalidInput);
  CHECK_THROWS_AS(build_initial_prompt(default_fewshot(), "   "), InvalidInput);
}

TEST_CASE("build_round_prompt places the reiteration line before the cue") {
  PromptPlan plan;
  plan.mode = Mode::kFocused;
  std::string base = build_base_prompt(default_fewshot(), "q");
  std::string prompt = build_round_prompt(plan, base, "Thought 1: t\nAction 1: Search[a]\n"
                                                      "Observation 1: o\n",
                                          3, "q");
  CHECK(ends_with_check(prompt, "(Original question: q)\nThought 3:") ==
        "(Original question: q)\nThought 3:");

  PromptPlan vanilla;
  std::string vp = build_round_prompt(vanilla, base, "", 1, "q");
  CHECK(vp == build_initial_prompt(default_fewshot(), "q"));

  CHECK_THROWS_AS(build_round_prompt(plan, base, "", 0, "q"), InvalidInput);
}

TEST_CASE("vanilla prompts contain the question exactly once") {
  const std::string question = "Who catalogued the zq93 manuscript?";
  Episode episode = scripted_episode(Mode::kVanilla, question);
  REQUIRE(episode.steps.size() == 5);
  for (const Step& step : episode.steps) {
    CHECK(count_occurrences(step.prompt, question) == 1);
    CHECK(count_occurrences(step.prompt, "(Original question:") == 0);
  }
}

TEST_CASE("focused round k contains the question k+1 times") {
  const std::string question = "Who catalogued the zq93 manuscript?";
  Episode episode = scripted_episode(Mode::kFocused, question);
  REQUIRE(episode.steps.size() == 5);
  PromptPlan plan;
  plan.mode = Mode::kFocused;
  const std::string line = reiteration_line(plan, question);
  for (const Step& step : episode.steps) {
    CHECK(count_occurrences(step.prompt, question) == step.index + 1);
    // Immediately before the thought cue, every round.
    std::string tail = line + "\nThought " + std::to_string(step.index) + ":";
    CHECK(ends_with_check(step.prompt, tail) == tail);
  }
}

TEST_CASE("vanilla prompts equal focused prompts with reiteration lines deleted") {
  const std::string question = "Who catalogued the zq93 manuscript?";
  Episode vanilla = scripted_episode(Mode::kVanilla, question);
  Episode focused = scripted_episode(Mode::kFocused, question);
  PromptPlan plan;
  plan.mode = Mode::kFocused;
  const std::string line = reiteration_line(plan, question) + "\n";
  for (size_t i = 0; i < 5; ++i) {
    CHECK(vanilla.steps[i].prompt == remove_all(focused.steps[i].prompt, line));
  }
}

TEST_CASE("round prompts extend base + transcript monotonically") {
  PromptPlan plan;
  plan.mode = Mode::kFocused;
  std::string base = build_base_prompt(default_fewshot(), "q");
  std::string transcript = "Thought 1: t\nAction 1: Search[a]\nObservation 1: o\n";
  std::string prompt = build_round_prompt(plan, base, transcript, 2, "q");
  CHECK(prompt.rfind(base + transcript, 0) == 0);
  CHECK(prompt.size() > (base + transcript).size());
}

TEST_CASE("forced answer prompt renders the termination request") {
  PromptPlan plan;
  std::string base = build_base_prompt(default_fewshot(), "Who founded Y?");
  std::string prompt = build_forced_answer_prompt(plan, base, "", "Who founded Y?");
  std::string suffix = "answer the original question: Who founded Y?\nAnswer:";
  CHECK(ends_with_check(prompt, suffix) == suffix);
}

TEST_CASE("plan templates are validated") {
  PromptPlan plan;
  validate_plan(plan);  // defaults are fine

  PromptPlan missing = plan;
  missing.forced_answer_template = "Just answer.";
  CHECK_THROWS_AS(validate_plan(missing), TemplateError);

  PromptPlan doubled = plan;
  doubled.reiteration_template = "{question} {question}";
  CHECK_THROWS_AS(validate_plan(doubled), TemplateError);

  PromptPlan no_stop = plan;
  no_stop.stop_sequences.clear();
  CHECK_THROWS_AS(validate_plan(no_stop), InvalidInput);

  PromptPlan no_tokens = plan;
  no_tokens.max_new_tokens = 0;
  CHECK_THROWS_AS(validate_plan(no_tokens), InvalidInput);
}

TEST_CASE("few-shot examples are validated against the grammar") {
  validate_fewshot(default_fewshot());  // must parse

  FewShotSet bad;
  bad.preamble = "p";
  bad.examples = {"Question: q\nThought 1: t\nAction 1: Search[x]\nObservation 1: o"};
  // No Finish at the end.
  CHECK_THROWS_AS(validate_fewshot(bad), TemplateError);

  FewShotSet skipped;
  skipped.preamble = "p";
  skipped.examples = {"Question: q\nThought 2: t\nAction 2: Finish[x]"};
  CHECK_THROWS_AS(validate_fewshot(skipped), TemplateError);

  FewShotSet unparseable;
  unparseable.preamble = "p";
  unparseable.examples = {"Question: q\nThought 1: t\nAction 1: Fetch[x]"};
  CHECK_THROWS_AS(validate_fewshot(unparseable), TemplateError);
}
