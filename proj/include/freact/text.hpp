#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace freact {

std::string trim(std::string_view text);
std::string to_lower(std::string_view text);

// Lowercases and collapses every whitespace run to a single space, with outer
// whitespace removed.
std::string fold_whitespace(std::string_view text);

std::vector<std::string> split_lines(std::string_view text);

// Non-overlapping occurrence count; empty needle counts zero.
int count_occurrences(std::string_view text, std::string_view needle);

// Replaces every "{placeholder}" in the template. Used by prompt templates.
std::string substitute(std::string_view templ, std::string_view placeholder,
                       std::string_view value);

// Stable 64-bit content digest for slim traces ("fnv1a:<16 hex>").
std::string fnv1a_digest(std::string_view text);

// Current UTC time as ISO-8601, for recorded_at stamps.
std::string now_iso8601();

}  // namespace freact
