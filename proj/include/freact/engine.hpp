#pragma once

#include <span>
#include <string>

#include "freact/backend.hpp"
#include "freact/prompting.hpp"
#include "freact/tools.hpp"
#include "freact/transcript.hpp"

namespace freact {

struct EngineConfig {
  int max_rounds = 8;
  // Malformed steps tolerated with a corrective observation; the step after
  // the budget is spent terminates the episode.
  int malformed_budget = 2;
  Mode mode = Mode::kVanilla;
  // Duplicate scope is every prior well-formed non-Finish action (not just
  // the previous one): A-B-A loops are a real failure mode.
};

// Synthetic observation fed back after a malformed action.
inline constexpr const char* kInvalidActionObservation =
    "Invalid action. Valid actions are Search[entity], Lookup[keyword], Finish[answer].";

// Synthetic observation when a live tool call fails after retries.
inline constexpr const char* kToolFailureObservation = "Search failed: temporary error.";

// True iff the candidate repeats any prior action: same normalized key as
// some well-formed non-Finish action in `prior`. Finish is exempt (it
// terminates anyway).
bool detect_duplicate(std::span<const Action> prior, const Action& candidate);

// Runs one episode: per round, build the mode-dependent prompt, complete,
// parse thought + action, then either finish, early-stop (Focused mode on a
// duplicate, skipping the tool call), execute the tool, or recover from a
// malformed action. Steps, prompts, and raw generations are all recorded on
// the episode. BackendError terminates the episode with the steps so far
// preserved; scripted-backend assertion failures (ScriptExhausted,
// ScriptMismatch) and fixture misses propagate, since they signal broken test
// setups rather than runtime conditions.
Episode run_episode(const std::string& question, const EngineConfig& config,
                    LlmBackend& backend, Toolset& tools, const PromptPlan& plan,
                    const FewShotSet& fewshot, const std::string& episode_id = "");

}  // namespace freact
