#pragma once

#include <optional>
#include <string>
#include <vector>

#include "freact/action.hpp"

namespace freact {

enum class Mode { kVanilla, kFocused };

const char* to_string(Mode mode);
std::optional<Mode> mode_from(const std::string& token);

enum class Termination {
  kFinished,
  kEarlyStopForced,
  kStepCapReached,
  kBackendError,
  kMalformedBudgetExceeded,
};

const char* to_string(Termination termination);
std::optional<Termination> termination_from(const std::string& token);

// One reasoning round. Observation is absent only for a terminal step
// (Finish, early stop, budget exhaustion, backend failure).
struct Step {
  int index = 0;  // 1-based, consecutive within an episode
  std::string thought;
  ParsedAction action = MalformedAction{};
  std::optional<std::string> observation;

  // Audit fields kept for the trace store. `prompt` is the full round prompt
  // sent to the backend and `raw_generation` the untouched completion;
  // `reiterated` records whether the prompt carried the reiteration line.
  std::string prompt;
  std::string raw_generation;
  bool reiterated = false;

  bool operator==(const Step&) const = default;
};

struct Timing {
  double wall_total = 0.0;  // seconds around the whole episode
  double model_time = 0.0;  // summed backend latencies
  double tool_time = 0.0;   // summed tool latencies

  bool operator==(const Timing&) const = default;
};

// One complete QA attempt.
struct Episode {
  std::string id;
  std::string question;
  Mode mode = Mode::kVanilla;
  std::vector<Step> steps;
  std::optional<std::string> final_answer;
  Termination termination = Termination::kStepCapReached;
  Timing timing;

  // Populated when a forced-answer request was issued (early stop, or step
  // cap in Focused mode).
  std::optional<std::string> forced_answer_prompt;
  std::optional<std::string> forced_answer_raw;

  bool operator==(const Episode&) const = default;
};

// One model generation split at the transcript cues.
struct ModelBlock {
  std::string thought;
  std::optional<std::string> action_line;

  bool operator==(const ModelBlock&) const = default;
};

// Splits a round's generation into the thought (text after an optional
// "Thought N:" cue, up to the "Action N:" cue) and the action line (first
// line after the action cue). No action cue means action_line is absent.
ModelBlock parse_model_block(const std::string& raw);

// Renders one completed step the way it appears in the growing prompt:
//   Thought N: ...\nAction N: ...\nObservation N: ...\n
// Malformed actions render their raw text. Used by the engine and by tests
// that reconstruct prompts.
std::string render_step(const Step& step);

}  // namespace freact
