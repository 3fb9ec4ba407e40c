#pragma once

#include <string>
#include <vector>

#include "freact/transcript.hpp"

namespace freact {

// Static prompt scaffold: instruction preamble plus complete example
// trajectories. Every example must parse under the transcript grammar;
// validate_fewshot enforces that at load time.
struct FewShotSet {
  std::string preamble;
  std::vector<std::string> examples;
};

// Throws TemplateError when an example trajectory breaks the grammar
// (non-consecutive round indices, unparseable action line, missing Finish).
void validate_fewshot(const FewShotSet& fewshot);

// Built-in scaffold with the standard Wikipedia QA action space and two
// worked examples.
const FewShotSet& default_fewshot();

struct PromptPlan {
  Mode mode = Mode::kVanilla;
  std::string reiteration_template = "(Original question: {question})";
  std::string forced_answer_template =
      "You have gathered enough information. Based on the observations above, "
      "answer the original question: {question}\nAnswer:";
  std::vector<std::string> stop_sequences = {"\nObservation"};
  int max_new_tokens = 256;
};

// Throws TemplateError unless both templates carry exactly one {question}
// placeholder, and InvalidInput on empty stop sequences or a non-positive
// token budget.
void validate_plan(const PromptPlan& plan);

// The reiteration template rendered for a concrete question (no newline).
std::string reiteration_line(const PromptPlan& plan, const std::string& question);

// preamble + examples + "Question: {question}\n". The stem every round
// prompt grows from.
std::string build_base_prompt(const FewShotSet& fewshot, const std::string& question);

// base + first round's thought cue, i.e. the complete round-1 prompt in
// vanilla form.
std::string build_initial_prompt(const FewShotSet& fewshot, const std::string& question);

// Appends the round's generation cue to base + transcript. Focused mode puts
// the reiteration line immediately before the cue, every round including the
// first. `transcript` holds the completed rounds (with any earlier
// reiteration lines left in place).
std::string build_round_prompt(const PromptPlan& plan, const std::string& base,
                               const std::string& transcript, int round,
                               const std::string& question);

// base + transcript + the termination request. The completion that comes
// back is the final answer verbatim (after trimming), never parsed as an
// action.
std::string build_forced_answer_prompt(const PromptPlan& plan, const std::string& base,
                                       const std::string& transcript,
                                       const std::string& question);

}  // namespace freact
