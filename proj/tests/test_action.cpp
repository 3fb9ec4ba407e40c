#include <doctest.h>

#include <random>

#include "freact/action.hpp"
#include "freact/text.hpp"
#include "support/malformed_corpus.hpp"

using namespace freact;

namespace {

Action require_action(const std::string& line) {
  ParsedAction parsed = parse_action(line);
  REQUIRE(is_well_formed(parsed));
  return std::get<Action>(parsed);
}

}  // namespace

TEST_CASE("parse_action recognizes the three actions") {
  Action a = require_action("Search[Nobel Prize in Physics]");
  CHECK(a.name == ActionName::kSearch);
  CHECK(a.argument == "Nobel Prize in Physics");

  // Case-insensitive name, trimmed argument.
  Action f = require_action("finish[ Arthur's Magazine ]");
  CHECK(f.name == ActionName::kFinish);
  CHECK(f.argument == "Arthur's Magazine");

  // Inner brackets belong to the argument: match to the last closing bracket.
  Action l = require_action("Lookup[array [0] index]");
  CHECK(l.name == ActionName::kLookup);
  CHECK(l.argument == "array [0] index");
}

TEST_CASE("parse_action yields MalformedAction for everything else") {
  ParsedAction parsed = parse_action("Fetch[url]");
  REQUIRE(!is_well_formed(parsed));
  CHECK(std::get<MalformedAction>(parsed).raw == "Fetch[url]");

  CHECK(!is_well_formed(parse_action("Search[]")));
  CHECK(!is_well_formed(parse_action("Search[   ]")));
  CHECK(!is_well_formed(parse_action("Search[x] and more")));
  CHECK(!is_well_formed(parse_action("Search x")));
}

TEST_CASE("malformed corpus never crashes and never parses") {
  for (const std::string& line : testing::malformed_corpus()) {
    ParsedAction parsed = parse_action(line);
    CHECK_MESSAGE(!is_well_formed(parsed), "unexpectedly parsed: ", line);
    CHECK(std::get<MalformedAction>(parsed).raw == line);
  }
}

TEST_CASE("normalize_action folds case and whitespace") {
  ActionKey key = normalize_action(Action{ActionName::kSearch, "Apple  Inc"});
  CHECK(key.name == "search");
  CHECK(key.argument == "apple inc");

  CHECK(normalize_action(Action{ActionName::kSearch, "apple inc"}) ==
        normalize_action(Action{ActionName::kSearch, "APPLE INC"}));
  CHECK(normalize_action(Action{ActionName::kSearch, "apple"}) !=
        normalize_action(Action{ActionName::kLookup, "apple"}));
}

TEST_CASE("normalize_action is idempotent on normalized arguments") {
  Action original{ActionName::kLookup, "  Mixed   CASE text "};
  ActionKey key = normalize_action(original);
  ActionKey again = normalize_action(Action{ActionName::kLookup, key.argument});
  CHECK(key == again);
}

TEST_CASE("render/parse round-trip holds for generated actions") {
  std::mt19937 rng(7);
  const std::string alphabet =
      "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 []()'-.,&";
  const ActionName names[] = {ActionName::kSearch, ActionName::kLookup, ActionName::kFinish};

  int checked = 0;
  for (int i = 0; i < 2000; ++i) {
    std::string arg;
    size_t len = 1 + rng() % 40;
    for (size_t j = 0; j < len; ++j) arg.push_back(alphabet[rng() % alphabet.size()]);
    // The grammar trims outer whitespace, so only trimmed arguments round-trip
    // exactly.
    arg = trim(arg);
    if (arg.empty()) continue;

    Action action{names[rng() % 3], arg};
    ParsedAction parsed = parse_action(render_action(action));
    REQUIRE(is_well_formed(parsed));
    CHECK(std::get<Action>(parsed) == action);
    ++checked;
  }
  CHECK(checked > 1500);
}
