#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "freact/action.hpp"

namespace freact {

struct WikiPage {
  std::string title;
  std::vector<std::string> sentences;

  bool operator==(const WikiPage&) const = default;
};

struct PageResult {
  std::optional<WikiPage> page;       // set on a hit
  std::vector<std::string> similar;   // candidate titles on a miss

  bool operator==(const PageResult&) const = default;
};

// Splits extract text on sentence boundaries (". ", "! ", "? ") with guards
// for common abbreviations and single-letter initials.
std::vector<std::string> split_sentences(const std::string& text);

// Where page text comes from: the live MediaWiki API or an in-memory corpus.
class KnowledgeSource {
 public:
  virtual ~KnowledgeSource() = default;
  // Throws ToolError on transport failure (after retries).
  virtual PageResult find_page(const std::string& entity) = 0;
};

// Canned pages for tests and offline runs. Title match is case- and
// whitespace-insensitive; misses list titles containing the query as a
// substring.
class InMemorySource : public KnowledgeSource {
 public:
  void add_page(WikiPage page);
  PageResult find_page(const std::string& entity) override;

 private:
  std::vector<WikiPage> pages_;
};

// Shared page cache keyed by the search action's normalized argument. Caching
// the PageResult (not the observation text) keeps Lookup working after a
// cache hit, since the hit still sets the episode's current page. Values for
// identical keys are identical by construction, so last-write-wins is safe.
class PageCache {
 public:
  std::optional<PageResult> get(const std::string& key) const;
  void put(const std::string& key, const PageResult& result);
  size_t size() const;

  // Line-delimited JSON, persisted beside traces.
  void save(const std::filesystem::path& path) const;
  // Merges entries from a previously saved cache file.
  void load(const std::filesystem::path& path);

 private:
  mutable std::shared_mutex mutex_;
  std::map<std::string, PageResult> entries_;
};

// Per-episode tool state, single-owner.
struct ToolState {
  std::optional<WikiPage> current_page;
  // Lowercased keyword -> matches already returned on the current page.
  // Cleared whenever current_page changes.
  std::map<std::string, int> lookup_cursor;
};

enum class ToolSource { kLive, kFixture, kCache };

const char* to_string(ToolSource source);

struct ToolResponse {
  std::string observation;
  double latency_seconds = 0.0;
  ToolSource source = ToolSource::kLive;
};

class Toolset {
 public:
  virtual ~Toolset() = default;
  virtual ToolResponse search(const std::string& entity, ToolState& state) = 0;
  virtual ToolResponse lookup(const std::string& keyword, ToolState& state) = 0;
};

struct WikiToolsetOptions {
  int summary_sentences = 5;  // observation length for a search hit
  int max_similar = 5;
};

// The real Search/Lookup semantics over a knowledge source, with an optional
// shared page cache.
class WikiToolset : public Toolset {
 public:
  explicit WikiToolset(KnowledgeSource& source, WikiToolsetOptions options = {},
                       PageCache* cache = nullptr);

  ToolResponse search(const std::string& entity, ToolState& state) override;
  ToolResponse lookup(const std::string& keyword, ToolState& state) override;

 private:
  KnowledgeSource& source_;
  WikiToolsetOptions options_;
  PageCache* cache_;
};

// One recorded action -> observation pair. Entries that failed at record
// time carry `error` instead of `observation`.
struct FixtureEntry {
  ActionKey key;
  std::optional<std::string> observation;
  std::optional<std::string> error;
  std::string recorded_at;
};

// Replays recorded observations keyed by normalized action. A missing key
// throws FixtureMiss (broken test setup); an error entry throws ToolError to
// reproduce the recorded transport failure.
class FixtureToolset : public Toolset {
 public:
  explicit FixtureToolset(std::vector<FixtureEntry> entries, double latency_seconds = 0.0);
  static FixtureToolset load(const std::filesystem::path& path, double latency_seconds = 0.0);

  ToolResponse search(const std::string& entity, ToolState& state) override;
  ToolResponse lookup(const std::string& keyword, ToolState& state) override;

  size_t size() const { return entries_.size(); }

 private:
  ToolResponse replay(const ActionKey& key);

  std::map<ActionKey, FixtureEntry> entries_;
  double latency_seconds_;
};

// Executes each Search/Lookup action against `live` (sequentially, one shared
// ToolState so Lookups see the preceding Search) and writes the fixture file.
// Equal normalized keys deduplicate to the first observation; transport
// failures become error entries. Returns the number of entries written.
int record_fixture(const std::vector<Action>& actions, Toolset& live,
                   const std::filesystem::path& destination);

// Parses a fixture file back into entries. Throws FixtureFormatError.
std::vector<FixtureEntry> load_fixture_entries(const std::filesystem::path& path);

}  // namespace freact
