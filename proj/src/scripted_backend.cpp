#include <fstream>
#include <sstream>

#include <json.hpp>

#include "freact/backend.hpp"
#include "freact/errors.hpp"
#include "freact/text.hpp"

namespace freact {

std::string strip_at_stop(const std::string& text, const std::vector<std::string>& stop) {
  size_t cut = text.size();
  for (const std::string& s : stop) {
    if (s.empty()) continue;
    size_t pos = text.find(s);
    if (pos != std::string::npos && pos < cut) cut = pos;
  }
  return text.substr(0, cut);
}

ScriptedBackend::ScriptedBackend(std::vector<ScriptEntry> entries, double latency_seconds)
    : entries_(std::move(entries)), latency_seconds_(latency_seconds) {}

CompletionResponse ScriptedBackend::complete(const CompletionRequest& request) {
  if (next_ >= entries_.size()) {
    throw ScriptExhausted("script exhausted after " + std::to_string(entries_.size()) +
                          " responses");
  }
  const ScriptEntry& entry = entries_[next_];
  if (entry.expected_prompt_substring &&
      request.prompt.find(*entry.expected_prompt_substring) == std::string::npos) {
    throw ScriptMismatch("script entry " + std::to_string(next_ + 1) +
                         " expected prompt to contain: " + *entry.expected_prompt_substring);
  }
  prompts_seen_.push_back(request.prompt);
  ++next_;
  return CompletionResponse{strip_at_stop(entry.response, request.stop), latency_seconds_,
                            std::nullopt};
}

namespace {

ScriptEntry entry_from_json(const nlohmann::json& value) {
  if (value.is_string()) return ScriptEntry{value.get<std::string>(), std::nullopt};
  if (!value.is_object() || !value.contains("response")) {
    throw FixtureFormatError("script entry must be a string or an object with \"response\"");
  }
  ScriptEntry entry;
  entry.response = value.at("response").get<std::string>();
  if (value.contains("expected_prompt_substring")) {
    entry.expected_prompt_substring = value.at("expected_prompt_substring").get<std::string>();
  }
  return entry;
}

}  // namespace

std::vector<ScriptEntry> load_script(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FixtureFormatError("cannot open script file: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string content = buffer.str();

  std::vector<ScriptEntry> entries;
  try {
    std::string trimmed = trim(content);
    if (!trimmed.empty() && trimmed.front() == '[') {
      nlohmann::json array = nlohmann::json::parse(trimmed);
      for (const auto& value : array) entries.push_back(entry_from_json(value));
    } else {
      int line_no = 0;
      for (const std::string& line : split_lines(content)) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
          entries.push_back(entry_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& ex) {
          throw FixtureFormatError("script line " + std::to_string(line_no) + ": " + ex.what());
        }
      }
    }
  } catch (const nlohmann::json::exception& ex) {
    throw FixtureFormatError("script file " + path.string() + ": " + ex.what());
  }
  return entries;
}

}  // namespace freact
