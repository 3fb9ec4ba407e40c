#include "freact/prompting.hpp"

#include <regex>

#include "freact/errors.hpp"
#include "freact/text.hpp"

namespace freact {

namespace {

const std::regex kRoundLine(R"(^(Thought|Action|Observation)[ \t]*([0-9]+)[ \t]*:[ \t]*(.*)$)");

void validate_trajectory(const std::string& example, size_t ordinal) {
  auto fail = [&](const std::string& why) {
    throw TemplateError("few-shot example " + std::to_string(ordinal) + ": " + why);
  };

  bool saw_question = false;
  int rounds = 0;
  std::optional<Action> last_action;

  for (const std::string& line : split_lines(example)) {
    if (line.rfind("Question:", 0) == 0) {
      saw_question = true;
      continue;
    }
    std::smatch m;
    if (!std::regex_match(line, m, kRoundLine)) continue;  // continuation text
    const std::string& cue = m[1];
    int index = std::stoi(m[2]);
    if (cue == "Thought") {
      if (index != rounds + 1) fail("thought index " + m[2].str() + " not consecutive");
      rounds = index;
    } else if (cue == "Action") {
      if (index != rounds) fail("action index " + m[2].str() + " without matching thought");
      ParsedAction parsed = parse_action(m[3]);
      if (!is_well_formed(parsed)) fail("unparseable action line: " + m[3].str());
      last_action = std::get<Action>(parsed);
    } else if (index != rounds) {
      fail("observation index " + m[2].str() + " out of order");
    }
  }

  if (!saw_question) fail("missing Question: header");
  if (rounds == 0) fail("no rounds");
  if (!last_action || last_action->name != ActionName::kFinish) {
    fail("trajectory does not end with Finish");
  }
}

constexpr const char* kDefaultPreamble =
    "Solve a question answering task with interleaving Thought, Action, Observation steps. "
    "Thought can reason about the current situation, and Action can be three types:\n"
    "(1) Search[entity], which searches the exact entity on Wikipedia and returns the first "
    "few sentences if it exists. If not, it will return some similar entities to search.\n"
    "(2) Lookup[keyword], which returns the next sentence containing keyword in the current "
    "passage.\n"
    "(3) Finish[answer], which returns the answer and finishes the task.\n"
    "Here are some examples.";

constexpr const char* kExampleMagazines =
    "Question: Which magazine was started first, Arthur's Magazine or First for Women?\n"
    "Thought 1: I need to search Arthur's Magazine and First for Women, and find which was "
    "started first.\n"
    "Action 1: Search[Arthur's Magazine]\n"
    "Observation 1: Arthur's Magazine was an American literary periodical first published in "
    "1844.\n"
    "Thought 2: Arthur's Magazine was started in 1844. I need to search First for Women "
    "next.\n"
    "Action 2: Search[First for Women]\n"
    "Observation 2: First for Women is a woman's magazine launched in 1989.\n"
    "Thought 3: First for Women was started in 1989. 1844 comes before 1989, so Arthur's "
    "Magazine was started first.\n"
    "Action 3: Finish[Arthur's Magazine]";

constexpr const char* kExampleOrogeny =
    "Question: What is the elevation range for the area that the eastern sector of the "
    "Colorado orogeny extends into?\n"
    "Thought 1: I need to search Colorado orogeny and find the area that its eastern sector "
    "extends into.\n"
    "Action 1: Search[Colorado orogeny]\n"
    "Observation 1: The Colorado orogeny was an episode of mountain building in Colorado and "
    "surrounding areas.\n"
    "Thought 2: It does not mention the eastern sector, so I can look it up.\n"
    "Action 2: Lookup[eastern sector]\n"
    "Observation 2: (Result 1/1) The eastern sector extends into the High Plains.\n"
    "Thought 3: The eastern sector extends into the High Plains. I need to search High Plains "
    "and find its elevation range.\n"
    "Action 3: Search[High Plains]\n"
    "Observation 3: The High Plains are a subregion of the Great Plains, rising in elevation "
    "from around 1,800 to 7,000 ft.\n"
    "Thought 4: The High Plains rise in elevation from around 1,800 to 7,000 ft, so the "
    "answer is 1,800 to 7,000 ft.\n"
    "Action 4: Finish[1,800 to 7,000 ft]";

}  // namespace

void validate_fewshot(const FewShotSet& fewshot) {
  for (size_t i = 0; i < fewshot.examples.size(); ++i) {
    validate_trajectory(fewshot.examples[i], i + 1);
  }
}

const FewShotSet& default_fewshot() {
  static const FewShotSet fewshot = [] {
    FewShotSet f;
    f.preamble = kDefaultPreamble;
    f.examples = {kExampleMagazines, kExampleOrogeny};
    validate_fewshot(f);
    return f;
  }();
  return fewshot;
}

void validate_plan(const PromptPlan& plan) {
  if (count_occurrences(plan.reiteration_template, "{question}") != 1) {
    throw TemplateError("reiteration template must contain exactly one {question} placeholder");
  }
  if (count_occurrences(plan.forced_answer_template, "{question}") != 1) {
    throw TemplateError(
        "forced-answer template must contain exactly one {question} placeholder");
  }
  if (plan.stop_sequences.empty()) {
    throw InvalidInput("prompt plan needs at least one stop sequence");
  }
  if (plan.max_new_tokens < 1) {
    throw InvalidInput("max_new_tokens must be positive");
  }
}

std::string reiteration_line(const PromptPlan& plan, const std::string& question) {
  return substitute(plan.reiteration_template, "question", question);
}

std::string build_base_prompt(const FewShotSet& fewshot, const std::string& question) {
  if (trim(question).empty()) throw InvalidInput("question must be non-empty");
  std::string out = fewshot.preamble;
  for (const std::string& example : fewshot.examples) {
    out += "\n\n";
    out += example;
  }
  out += "\n\nQuestion: " + question + "\n";
  return out;
}

std::string build_initial_prompt(const FewShotSet& fewshot, const std::string& question) {
  return build_base_prompt(fewshot, question) + "Thought 1:";
}

std::string build_round_prompt(const PromptPlan& plan, const std::string& base,
                               const std::string& transcript, int round,
                               const std::string& question) {
  if (round < 1) throw InvalidInput("round must be >= 1");
  std::string out = base + transcript;
  if (plan.mode == Mode::kFocused) {
    out += reiteration_line(plan, question);
    out += "\n";
  }
  out += "Thought " + std::to_string(round) + ":";
  return out;
}

std::string build_forced_answer_prompt(const PromptPlan& plan, const std::string& base,
                                       const std::string& transcript,
                                       const std::string& question) {
  return base + transcript + substitute(plan.forced_answer_template, "question", question);
}

}  // namespace freact
