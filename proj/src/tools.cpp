#include "freact/tools.hpp"

#include <chrono>
#include <fstream>
#include <mutex>

#include <json.hpp>

#include "freact/errors.hpp"
#include "freact/text.hpp"

namespace freact {

namespace {

using nlohmann::json;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

std::string miss_observation(const std::string& entity, const std::vector<std::string>& similar,
                             int max_similar) {
  std::vector<std::string> shown(similar.begin(),
                                 similar.begin() + std::min<size_t>(similar.size(),
                                                                    static_cast<size_t>(max_similar)));
  return "Could not find [" + entity + "]. Similar: [" + join(shown, ", ") + "].";
}

json page_result_to_json(const PageResult& result) {
  json value;
  if (result.page) {
    value["page"] = {{"title", result.page->title}, {"sentences", result.page->sentences}};
  }
  value["similar"] = result.similar;
  return value;
}

PageResult page_result_from_json(const json& value) {
  PageResult result;
  if (value.contains("page")) {
    WikiPage page;
    page.title = value["page"].at("title").get<std::string>();
    page.sentences = value["page"].at("sentences").get<std::vector<std::string>>();
    result.page = std::move(page);
  }
  if (value.contains("similar")) {
    result.similar = value["similar"].get<std::vector<std::string>>();
  }
  return result;
}

}  // namespace

const char* to_string(ToolSource source) {
  switch (source) {
    case ToolSource::kLive: return "live";
    case ToolSource::kFixture: return "fixture";
    case ToolSource::kCache: return "cache";
  }
  return "?";
}

void InMemorySource::add_page(WikiPage page) { pages_.push_back(std::move(page)); }

PageResult InMemorySource::find_page(const std::string& entity) {
  std::string key = fold_whitespace(entity);
  for (const WikiPage& page : pages_) {
    if (fold_whitespace(page.title) == key) return PageResult{page, {}};
  }
  PageResult miss;
  for (const WikiPage& page : pages_) {
    if (to_lower(page.title).find(key) != std::string::npos) {
      miss.similar.push_back(page.title);
    }
  }
  return miss;
}

std::optional<PageResult> PageCache::get(const std::string& key) const {
  std::shared_lock lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void PageCache::put(const std::string& key, const PageResult& result) {
  std::unique_lock lock(mutex_);
  entries_[key] = result;
}

size_t PageCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

void PageCache::save(const std::filesystem::path& path) const {
  std::shared_lock lock(mutex_);
  std::ofstream out(path);
  if (!out) throw Error("cannot write cache file: " + path.string());
  for (const auto& [key, result] : entries_) {
    json line = {{"key", key}, {"result", page_result_to_json(result)}};
    out << line.dump() << "\n";
  }
}

void PageCache::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open cache file: " + path.string());
  std::unique_lock lock(mutex_);
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    try {
      json value = json::parse(line);
      entries_[value.at("key").get<std::string>()] =
          page_result_from_json(value.at("result"));
    } catch (const json::exception& ex) {
      throw FixtureFormatError("cache file " + path.string() + ": " + ex.what());
    }
  }
}

WikiToolset::WikiToolset(KnowledgeSource& source, WikiToolsetOptions options, PageCache* cache)
    : source_(source), options_(options), cache_(cache) {}

ToolResponse WikiToolset::search(const std::string& entity, ToolState& state) {
  if (trim(entity).empty()) throw InvalidInput("search entity must be non-empty");
  auto started = std::chrono::steady_clock::now();

  std::string key = fold_whitespace(entity);
  ToolSource origin = ToolSource::kLive;
  PageResult result;
  if (cache_) {
    if (auto cached = cache_->get(key)) {
      result = std::move(*cached);
      origin = ToolSource::kCache;
    }
  }
  if (origin == ToolSource::kLive) {
    result = source_.find_page(entity);
    if (cache_) cache_->put(key, result);
  }

  ToolResponse response;
  response.source = origin;
  if (result.page && !result.page->sentences.empty()) {
    state.current_page = result.page;
    state.lookup_cursor.clear();
    const auto& sentences = result.page->sentences;
    size_t take = std::min<size_t>(sentences.size(),
                                   static_cast<size_t>(options_.summary_sentences));
    response.observation =
        join(std::vector<std::string>(sentences.begin(), sentences.begin() + take), " ");
  } else {
    response.observation = miss_observation(entity, result.similar, options_.max_similar);
  }
  response.latency_seconds = seconds_since(started);
  return response;
}

ToolResponse WikiToolset::lookup(const std::string& keyword, ToolState& state) {
  if (trim(keyword).empty()) throw InvalidInput("lookup keyword must be non-empty");
  auto started = std::chrono::steady_clock::now();

  ToolResponse response;
  response.source = ToolSource::kLive;
  if (!state.current_page) {
    response.observation = "No page is currently loaded. Search first.";
    response.latency_seconds = seconds_since(started);
    return response;
  }

  std::string needle = to_lower(keyword);
  std::vector<const std::string*> matches;
  for (const std::string& sentence : state.current_page->sentences) {
    if (to_lower(sentence).find(needle) != std::string::npos) matches.push_back(&sentence);
  }

  int& cursor = state.lookup_cursor[needle];
  if (cursor < static_cast<int>(matches.size())) {
    response.observation = "(Result " + std::to_string(cursor + 1) + "/" +
                           std::to_string(matches.size()) + ") " + *matches[cursor];
    ++cursor;
  } else {
    response.observation = "No more results for [" + keyword + "].";
  }
  response.latency_seconds = seconds_since(started);
  return response;
}

FixtureToolset::FixtureToolset(std::vector<FixtureEntry> entries, double latency_seconds)
    : latency_seconds_(latency_seconds) {
  for (FixtureEntry& entry : entries) {
    ActionKey key = entry.key;
    entries_.emplace(std::move(key), std::move(entry));
  }
}

FixtureToolset FixtureToolset::load(const std::filesystem::path& path, double latency_seconds) {
  return FixtureToolset(load_fixture_entries(path), latency_seconds);
}

ToolResponse FixtureToolset::replay(const ActionKey& key) {
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    throw FixtureMiss("fixture has no entry for " + key.name + "[" + key.argument + "]");
  }
  if (it->second.error) {
    throw ToolError("recorded failure for " + key.name + "[" + key.argument +
                    "]: " + *it->second.error);
  }
  return ToolResponse{*it->second.observation, latency_seconds_, ToolSource::kFixture};
}

ToolResponse FixtureToolset::search(const std::string& entity, ToolState&) {
  return replay(normalize_action(Action{ActionName::kSearch, entity}));
}

ToolResponse FixtureToolset::lookup(const std::string& keyword, ToolState&) {
  return replay(normalize_action(Action{ActionName::kLookup, keyword}));
}

int record_fixture(const std::vector<Action>& actions, Toolset& live,
                   const std::filesystem::path& destination) {
  std::ofstream out(destination);
  if (!out) throw Error("cannot write fixture file: " + destination.string());

  ToolState state;
  std::map<ActionKey, bool> seen;
  int written = 0;
  for (const Action& action : actions) {
    if (action.name == ActionName::kFinish) continue;  // nothing to execute
    ActionKey key = normalize_action(action);
    if (seen.count(key)) continue;
    seen[key] = true;

    json record = {{"key_name", key.name},
                   {"key_arg", key.argument},
                   {"recorded_at", now_iso8601()}};
    try {
      ToolResponse response = action.name == ActionName::kSearch
                                  ? live.search(action.argument, state)
                                  : live.lookup(action.argument, state);
      record["observation"] = response.observation;
    } catch (const ToolError& ex) {
      record["error"] = ex.what();
    }
    out << record.dump() << "\n";
    ++written;
  }
  return written;
}

std::vector<FixtureEntry> load_fixture_entries(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FixtureFormatError("cannot open fixture file: " + path.string());
  std::vector<FixtureEntry> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      json value = json::parse(line);
      FixtureEntry entry;
      entry.key.name = value.at("key_name").get<std::string>();
      entry.key.argument = value.at("key_arg").get<std::string>();
      if (value.contains("observation")) {
        entry.observation = value["observation"].get<std::string>();
      }
      if (value.contains("error")) entry.error = value["error"].get<std::string>();
      if (!entry.observation && !entry.error) {
        throw FixtureFormatError("fixture line " + std::to_string(line_no) +
                                 " has neither observation nor error");
      }
      entry.recorded_at = value.value("recorded_at", "");
      entries.push_back(std::move(entry));
    } catch (const json::exception& ex) {
      throw FixtureFormatError("fixture line " + std::to_string(line_no) + ": " + ex.what());
    }
  }
  return entries;
}

}  // namespace freact
