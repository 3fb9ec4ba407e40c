#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "freact/transcript.hpp"

namespace freact {

inline constexpr int kTraceSchemaVersion = 1;

// Full serialization keeps prompts and raw generations verbatim (needed to
// audit reiteration behavior); slim mode stores content digests instead.
nlohmann::json episode_to_json(const Episode& episode, bool slim = false);
Episode episode_from_json(const nlohmann::json& value);

// One record per line, UTF-8. Returns the number of records written.
int save_episodes(const std::vector<Episode>& episodes, const std::filesystem::path& path,
                  bool slim = false);

// Rejects unknown schema versions (SchemaVersionError) and corrupt lines
// (TraceParseError naming the line).
std::vector<Episode> load_episodes(const std::filesystem::path& path);

struct LoopGroup {
  ActionKey key;
  std::vector<int> step_indices;  // 1-based, ascending

  bool operator==(const LoopGroup&) const = default;
};

// Groups well-formed non-Finish actions by normalized key and returns every
// key seen at least twice, ordered by first occurrence.
std::vector<LoopGroup> detect_action_loops(const Episode& episode);

struct FailureSummary {
  double loop_rate = 0.0;       // episodes with >= 1 loop group
  double cap_rate = 0.0;        // episodes terminated by the step cap
  double malformed_rate = 0.0;  // episodes with >= 1 malformed step
  std::map<int, int> step_histogram;  // step count -> episode count
};

// Objective failure-mode proxies over a trace set. Throws InvalidInput on an
// empty list.
FailureSummary summarize_failures(const std::vector<Episode>& episodes);

}  // namespace freact
