#include "freact/engine.hpp"

#include <chrono>

#include "freact/errors.hpp"
#include "freact/text.hpp"

namespace freact {

bool detect_duplicate(std::span<const Action> prior, const Action& candidate) {
  if (candidate.name == ActionName::kFinish) return false;
  ActionKey key = normalize_action(candidate);
  for (const Action& earlier : prior) {
    if (earlier.name == ActionName::kFinish) continue;
    if (normalize_action(earlier) == key) return true;
  }
  return false;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

Episode run_episode(const std::string& question, const EngineConfig& config,
                    LlmBackend& backend, Toolset& tools, const PromptPlan& plan,
                    const FewShotSet& fewshot, const std::string& episode_id) {
  if (trim(question).empty()) throw InvalidInput("question must be non-empty");
  if (config.max_rounds < 1) throw InvalidInput("max_rounds must be >= 1");
  if (config.malformed_budget < 0) throw InvalidInput("malformed_budget must be >= 0");
  if (config.mode != plan.mode) {
    throw InvalidInput("engine mode and prompt plan mode disagree");
  }
  validate_plan(plan);

  Episode episode;
  episode.id = episode_id;
  episode.question = question;
  episode.mode = config.mode;

  const bool focused = config.mode == Mode::kFocused;
  const std::string base = build_base_prompt(fewshot, question);
  const std::string round_prefix =
      focused ? reiteration_line(plan, question) + "\n" : std::string();

  std::string transcript;  // completed rounds, reiteration lines included
  ToolState tool_state;
  std::vector<Action> prior_actions;
  int malformed_spent = 0;
  bool terminated = false;

  auto wall_start = Clock::now();

  auto request_forced_answer = [&](const std::string& forced_transcript) {
    std::string prompt = build_forced_answer_prompt(plan, base, forced_transcript, question);
    episode.forced_answer_prompt = prompt;
    CompletionResponse response = backend.complete(
        CompletionRequest{prompt, plan.stop_sequences, plan.max_new_tokens, 0.0});
    episode.timing.model_time += response.latency_seconds;
    episode.forced_answer_raw = response.text;
    episode.final_answer = trim(response.text);
  };

  try {
    for (int round = 1; round <= config.max_rounds && !terminated; ++round) {
      std::string prompt = build_round_prompt(plan, base, transcript, round, question);
      CompletionResponse response = backend.complete(
          CompletionRequest{prompt, plan.stop_sequences, plan.max_new_tokens, 0.0});
      episode.timing.model_time += response.latency_seconds;

      ModelBlock block = parse_model_block(response.text);

      Step step;
      step.index = round;
      step.thought = block.thought;
      step.prompt = std::move(prompt);
      step.raw_generation = response.text;
      step.reiterated = focused;
      step.action = block.action_line ? parse_action(*block.action_line)
                                      : ParsedAction(MalformedAction{response.text});

      if (const Action* action = std::get_if<Action>(&step.action)) {
        if (action->name == ActionName::kFinish) {
          episode.final_answer = action->argument;
          episode.termination = Termination::kFinished;
          episode.steps.push_back(std::move(step));
          terminated = true;
        } else if (focused && detect_duplicate(prior_actions, *action)) {
          // The trigger fires before execution; the repeated tool call is
          // exactly the work the early stop exists to skip.
          std::string forced_transcript = transcript + round_prefix + render_step(step);
          episode.steps.push_back(std::move(step));
          request_forced_answer(forced_transcript);
          episode.termination = Termination::kEarlyStopForced;
          terminated = true;
        } else {
          try {
            ToolResponse tool_response = action->name == ActionName::kSearch
                                             ? tools.search(action->argument, tool_state)
                                             : tools.lookup(action->argument, tool_state);
            episode.timing.tool_time += tool_response.latency_seconds;
            step.observation = std::move(tool_response.observation);
          } catch (const ToolError&) {
            step.observation = kToolFailureObservation;
          }
          prior_actions.push_back(*action);
          transcript += round_prefix + render_step(step);
          episode.steps.push_back(std::move(step));
        }
      } else {
        if (malformed_spent >= config.malformed_budget) {
          episode.steps.push_back(std::move(step));
          episode.termination = Termination::kMalformedBudgetExceeded;
          terminated = true;
        } else {
          ++malformed_spent;
          step.observation = kInvalidActionObservation;
          transcript += round_prefix + render_step(step);
          episode.steps.push_back(std::move(step));
        }
      }
    }

    if (!terminated) {
      episode.termination = Termination::kStepCapReached;
      // Consistent with the early stop's philosophy: a capped Focused episode
      // still asks for an answer from what was gathered.
      if (focused) request_forced_answer(transcript);
    }
  } catch (const BackendError&) {
    episode.termination = Termination::kBackendError;
    episode.final_answer.reset();
  }

  episode.timing.wall_total = seconds_since(wall_start);
  return episode;
}

}  // namespace freact
