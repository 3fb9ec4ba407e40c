#include "freact/action.hpp"

#include "freact/text.hpp"

namespace freact {

const char* to_string(ActionName name) {
  switch (name) {
    case ActionName::kSearch: return "Search";
    case ActionName::kLookup: return "Lookup";
    case ActionName::kFinish: return "Finish";
  }
  return "?";
}

std::optional<ActionName> action_name_from(const std::string& token) {
  std::string lowered = to_lower(token);
  if (lowered == "search") return ActionName::kSearch;
  if (lowered == "lookup") return ActionName::kLookup;
  if (lowered == "finish") return ActionName::kFinish;
  return std::nullopt;
}

ParsedAction parse_action(const std::string& raw) {
  std::string line = trim(raw);
  size_t open = line.find('[');
  if (open == std::string::npos || line.empty() || line.back() != ']') {
    return MalformedAction{raw};
  }
  // Inner brackets stay inside the argument: match to the last ']' on the
  // line, which the end-check above pins to the final character.
  size_t close = line.size() - 1;
  if (close <= open) return MalformedAction{raw};

  auto name = action_name_from(trim(line.substr(0, open)));
  if (!name) return MalformedAction{raw};

  std::string argument = trim(line.substr(open + 1, close - open - 1));
  if (argument.empty()) return MalformedAction{raw};

  return Action{*name, std::move(argument)};
}

ActionKey normalize_action(const Action& action) {
  return ActionKey{to_lower(to_string(action.name)), fold_whitespace(action.argument)};
}

std::string render_action(const Action& action) {
  return std::string(to_string(action.name)) + "[" + action.argument + "]";
}

}  // namespace freact
