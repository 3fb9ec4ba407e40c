#include <array>
#include <cctype>

#include "freact/text.hpp"
#include "freact/tools.hpp"

namespace freact {

namespace {

// Tokens that end with '.' without ending a sentence.
constexpr std::array kAbbreviations = {
    "mr.", "mrs.", "ms.", "dr.", "prof.", "st.", "jr.", "sr.",  "vs.",  "etc.",
    "e.g.", "i.e.", "cf.", "al.", "inc.", "ltd.", "co.", "corp.", "no.", "fig.",
    "u.s.", "u.k.", "a.m.", "p.m.",
};

bool is_abbreviation(const std::string& token) {
  std::string lowered = to_lower(token);
  for (const char* abbr : kAbbreviations) {
    if (lowered == abbr) return true;
  }
  // Single-letter initials like "J." in "J. R. R. Tolkien".
  return lowered.size() == 2 && std::isalpha(static_cast<unsigned char>(lowered[0])) != 0;
}

// The word (including its trailing terminator) ending at position `pos`.
std::string token_ending_at(const std::string& text, size_t pos) {
  size_t start = pos;
  while (start > 0 && !std::isspace(static_cast<unsigned char>(text[start - 1]))) --start;
  return text.substr(start, pos - start + 1);
}

}  // namespace

std::vector<std::string> split_sentences(const std::string& text) {
  std::vector<std::string> sentences;
  std::string current;
  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '\n') {
      // Paragraph breaks always end a sentence.
      std::string trimmed = trim(current);
      if (!trimmed.empty()) sentences.push_back(std::move(trimmed));
      current.clear();
      continue;
    }
    current.push_back(c);
    if (c != '.' && c != '!' && c != '?') continue;
    bool at_end = i + 1 >= text.size();
    bool followed_by_space =
        !at_end && std::isspace(static_cast<unsigned char>(text[i + 1])) != 0;
    if (!at_end && !followed_by_space) continue;
    if (c == '.' && is_abbreviation(token_ending_at(text, i))) continue;
    std::string trimmed = trim(current);
    if (!trimmed.empty()) sentences.push_back(std::move(trimmed));
    current.clear();
  }
  std::string tail = trim(current);
  if (!tail.empty()) sentences.push_back(std::move(tail));
  return sentences;
}

}  // namespace freact
