#pragma once

#include <string>
#include <vector>

namespace freact::testing {

// Fifty action lines that must all parse to MalformedAction without crashing:
// unknown names, broken brackets, empty arguments, junk, and near-misses.
inline const std::vector<std::string>& malformed_corpus() {
  static const std::vector<std::string> corpus = {
      "",
      " ",
      "\t",
      "Search",
      "Lookup",
      "Finish",
      "Search[]",
      "Lookup[   ]",
      "Finish[\t]",
      "Fetch[url]",
      "Browse[page]",
      "Think[hard]",
      "search lookup finish",
      "Search x",
      "Search (x)",
      "Search{x}",
      "Search<x>",
      "[x]",
      "[Search]x",
      "]Search[x",
      "Search]x[",
      "Search[x",
      "Searchx]",
      "Finish[",
      "Finish]",
      "[",
      "]",
      "[]",
      "Search[x] trailing junk",
      "Search [x] more",
      "I should Search[x] now",
      "Action 1: Search[x] extra]text[",
      "Searchh[x]",
      "Loookup[x]",
      "Finnish[answer]",
      "SearchLookup[x]",
      "Search Lookup[x]",
      "42",
      "Search42[x]",
      "-Search[x]-",
      "\"Search[x]\"",
      "`Search[x]`",
      "**Search**[x]",
      "Search|x|",
      "S e a r c h[x]",
      "\xF0\x9F\x94\x8D[query]",
      "Search\t\t",
      "lookup:keyword",
      "finish answer",
      "Unknown[\xC3\xA9]",
  };
  return corpus;
}

}  // namespace freact::testing
