#pragma once

#include <compare>
#include <optional>
#include <string>
#include <variant>

namespace freact {

// The closed HotPotQA action vocabulary. Kept closed on purpose: duplicate
// detection and the test suite rely on exact semantics.
enum class ActionName { kSearch, kLookup, kFinish };

const char* to_string(ActionName name);
std::optional<ActionName> action_name_from(const std::string& token);

struct Action {
  ActionName name = ActionName::kSearch;
  std::string argument;  // non-empty after trimming, case preserved

  bool operator==(const Action&) const = default;
};

// Model output that did not match the action grammar. A value, not an error:
// the engine's recovery policy needs the raw text.
struct MalformedAction {
  std::string raw;

  bool operator==(const MalformedAction&) const = default;
};

using ParsedAction = std::variant<Action, MalformedAction>;

inline bool is_well_formed(const ParsedAction& a) { return std::holds_alternative<Action>(a); }

// Equality of these keys defines "repeated action": lowercased name plus the
// argument lowercased with whitespace runs collapsed and outer whitespace
// removed.
struct ActionKey {
  std::string name;
  std::string argument;

  auto operator<=>(const ActionKey&) const = default;
};

// Parses one action line of the form `Name[argument]`. The name matches
// Search/Lookup/Finish case-insensitively; the argument spans from the first
// '[' to the last ']' on the line (inner brackets allowed) and is trimmed.
// Anything else comes back as MalformedAction carrying the raw text.
ParsedAction parse_action(const std::string& raw);

ActionKey normalize_action(const Action& action);

// Canonical rendering, `Name[argument]`. parse_action(render_action(a)) == a.
std::string render_action(const Action& action);

}  // namespace freact
