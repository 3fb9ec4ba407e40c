#include "freact/transcript.hpp"

#include <regex>

#include "freact/text.hpp"

namespace freact {

const char* to_string(Mode mode) {
  return mode == Mode::kVanilla ? "vanilla" : "focused";
}

std::optional<Mode> mode_from(const std::string& token) {
  std::string lowered = to_lower(token);
  if (lowered == "vanilla") return Mode::kVanilla;
  if (lowered == "focused") return Mode::kFocused;
  return std::nullopt;
}

const char* to_string(Termination termination) {
  switch (termination) {
    case Termination::kFinished: return "finished";
    case Termination::kEarlyStopForced: return "early_stop_forced";
    case Termination::kStepCapReached: return "step_cap_reached";
    case Termination::kBackendError: return "backend_error";
    case Termination::kMalformedBudgetExceeded: return "malformed_budget_exceeded";
  }
  return "?";
}

std::optional<Termination> termination_from(const std::string& token) {
  std::string lowered = to_lower(token);
  if (lowered == "finished") return Termination::kFinished;
  if (lowered == "early_stop_forced") return Termination::kEarlyStopForced;
  if (lowered == "step_cap_reached") return Termination::kStepCapReached;
  if (lowered == "backend_error") return Termination::kBackendError;
  if (lowered == "malformed_budget_exceeded") return Termination::kMalformedBudgetExceeded;
  return std::nullopt;
}

namespace {

// Cues are line-anchored; the round number is optional because models are
// sloppy about echoing it.
const std::regex kThoughtCue(R"(^[ \t]*Thought[ \t]*[0-9]*[ \t]*:)");
const std::regex kActionCue(R"((^|\n)[ \t]*Action[ \t]*[0-9]*[ \t]*:)");

// First non-empty line, trimmed.
std::string first_line(const std::string& text) {
  for (const std::string& line : split_lines(text)) {
    std::string trimmed = trim(line);
    if (!trimmed.empty()) return trimmed;
  }
  return "";
}

}  // namespace

ModelBlock parse_model_block(const std::string& raw) {
  std::string thought_part = raw;
  std::optional<std::string> action_line;

  std::smatch action_match;
  if (std::regex_search(raw, action_match, kActionCue)) {
    thought_part = raw.substr(0, static_cast<size_t>(action_match.position(0)));
    std::string after_cue =
        raw.substr(static_cast<size_t>(action_match.position(0)) + action_match.length(0));
    action_line = first_line(after_cue);
  }

  // The prompt ends with the cue, so generations normally start with bare
  // thought text; strip the cue when a model echoes it anyway.
  std::smatch thought_match;
  if (std::regex_search(thought_part, thought_match, kThoughtCue)) {
    thought_part = thought_part.substr(
        static_cast<size_t>(thought_match.position(0)) + thought_match.length(0));
  }

  return ModelBlock{trim(thought_part), std::move(action_line)};
}

std::string render_step(const Step& step) {
  std::string idx = std::to_string(step.index);
  std::string out = "Thought " + idx + ": " + step.thought + "\n";
  out += "Action " + idx + ": ";
  if (const Action* action = std::get_if<Action>(&step.action)) {
    out += render_action(*action);
  } else {
    out += std::get<MalformedAction>(step.action).raw;
  }
  out += "\n";
  if (step.observation) {
    out += "Observation " + idx + ": " + *step.observation + "\n";
  }
  return out;
}

}  // namespace freact
