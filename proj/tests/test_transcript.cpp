#include <doctest.h>

#include "freact/transcript.hpp"

using namespace freact;

TEST_CASE("parse_model_block splits thought and action line") {
  ModelBlock block = parse_model_block("Thought 1: I need to search X.\nAction 1: Search[X]");
  CHECK(block.thought == "I need to search X.");
  REQUIRE(block.action_line.has_value());
  CHECK(*block.action_line == "Search[X]");
}

TEST_CASE("parse_model_block without an action cue") {
  ModelBlock block = parse_model_block("Thought 2: done");
  CHECK(block.thought == "done");
  CHECK(!block.action_line.has_value());
}

TEST_CASE("parse_model_block ignores text after the action line") {
  ModelBlock block = parse_model_block("Thought 1: a\nAction 1: Finish[b]\ngarbage");
  CHECK(block.thought == "a");
  REQUIRE(block.action_line.has_value());
  CHECK(*block.action_line == "Finish[b]");
}

TEST_CASE("parse_model_block handles bare generations") {
  // The prompt ends with the cue, so most generations start with raw thought
  // text and no echoed cue.
  ModelBlock block = parse_model_block(" I should search.\nAction 3: Search[Y]");
  CHECK(block.thought == "I should search.");
  CHECK(*block.action_line == "Search[Y]");

  // Cue without a round number still counts.
  ModelBlock bare = parse_model_block("reasoning\nAction: Lookup[z]");
  CHECK(bare.thought == "reasoning");
  CHECK(*bare.action_line == "Lookup[z]");

  // Action on the line after the cue.
  ModelBlock split = parse_model_block("x\nAction 1:\nSearch[q]");
  CHECK(*split.action_line == "Search[q]");
}

TEST_CASE("render_step formats a transcript round") {
  Step step;
  step.index = 2;
  step.thought = "check the page";
  step.action = Action{ActionName::kLookup, "capital"};
  step.observation = "(Result 1/1) The capital is Paris.";
  CHECK(render_step(step) ==
        "Thought 2: check the page\n"
        "Action 2: Lookup[capital]\n"
        "Observation 2: (Result 1/1) The capital is Paris.\n");

  Step terminal;
  terminal.index = 3;
  terminal.thought = "done";
  terminal.action = Action{ActionName::kFinish, "Paris"};
  CHECK(render_step(terminal) == "Thought 3: done\nAction 3: Finish[Paris]\n");

  Step malformed;
  malformed.index = 1;
  malformed.thought = "confused";
  malformed.action = MalformedAction{"Fetch[url]"};
  malformed.observation = "Invalid action.";
  CHECK(render_step(malformed) ==
        "Thought 1: confused\nAction 1: Fetch[url]\nObservation 1: Invalid action.\n");
}

TEST_CASE("mode and termination names round-trip") {
  CHECK(mode_from(to_string(Mode::kVanilla)) == Mode::kVanilla);
  CHECK(mode_from(to_string(Mode::kFocused)) == Mode::kFocused);
  CHECK(!mode_from("other").has_value());

  for (Termination t : {Termination::kFinished, Termination::kEarlyStopForced,
                        Termination::kStepCapReached, Termination::kBackendError,
                        Termination::kMalformedBudgetExceeded}) {
    CHECK(termination_from(to_string(t)) == t);
  }
  CHECK(!termination_from("melted").has_value());
}
